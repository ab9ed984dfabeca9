#include "mfvdm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mfvdm {

namespace {

void require_same_size(const Image& x, const Image& ref, const char* what) {
  if (x.rows() != ref.rows() || x.cols() != ref.cols())
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": image sizes differ");
}

int reflect(int i, int n) {
  // Half-sample symmetric extension: ... b a | a b c ... c | c b ...
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}

Image gaussian_filter(const Image& in, const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  const int rows = static_cast<int>(in.rows()), cols = static_cast<int>(in.cols());
  Image tmp(rows, cols), out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0;
      for (int t = -radius; t <= radius; ++t) acc += kernel[static_cast<std::size_t>(t + radius)] * in(reflect(r + t, rows), c);
      tmp(r, c) = acc;
    }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0;
      for (int t = -radius; t <= radius; ++t) acc += kernel[static_cast<std::size_t>(t + radius)] * tmp(r, reflect(c + t, cols));
      out(r, c) = acc;
    }
  return out;
}

}  // namespace

double mse(const Image& x, const Image& ref) {
  require_same_size(x, ref, "mse");
  if (x.size() == 0) throw Error(ErrorCode::kInvalidArgument, "mse: empty image");
  return (x - ref).squaredNorm() / static_cast<double>(x.size());
}

double psnr(const Image& x, const Image& ref) {
  const double err = mse(x, ref);
  const double peak = ref.maxCoeff() - ref.minCoeff();
  if (!(peak > 0)) throw Error(ErrorCode::kInvalidArgument, "psnr: reference image is constant");
  if (err == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / err);
}

double ssim(const Image& x, const Image& ref, const SsimOptions& options) {
  require_same_size(x, ref, "ssim");
  if (options.window < 3 || options.window % 2 == 0)
    throw Error(ErrorCode::kInvalidArgument, "ssim: window must be odd and >= 3");
  if (x.rows() < options.window || x.cols() < options.window)
    throw Error(ErrorCode::kInvalidArgument, "ssim: image smaller than the window");
  const double range = ref.maxCoeff() - ref.minCoeff();
  if (!(range > 0)) throw Error(ErrorCode::kInvalidArgument, "ssim: reference image is constant");

  const int radius = options.window / 2;
  std::vector<double> kernel(static_cast<std::size_t>(options.window));
  double norm = 0;
  for (int t = -radius; t <= radius; ++t) {
    const double w = std::exp(-0.5 * t * t / (options.sigma * options.sigma));
    kernel[static_cast<std::size_t>(t + radius)] = w;
    norm += w;
  }
  for (double& w : kernel) w /= norm;

  const Image ux = gaussian_filter(x, kernel), uy = gaussian_filter(ref, kernel);
  const Image uxx = gaussian_filter(x.cwiseProduct(x), kernel);
  const Image uyy = gaussian_filter(ref.cwiseProduct(ref), kernel);
  const Image uxy = gaussian_filter(x.cwiseProduct(ref), kernel);
  const double c1 = std::pow(options.k1 * range, 2), c2 = std::pow(options.k2 * range, 2);

  double total = 0;
  int count = 0;
  for (int r = radius; r < x.rows() - radius; ++r)
    for (int c = radius; c < x.cols() - radius; ++c) {
      const double mx = ux(r, c), my = uy(r, c);
      const double vx = uxx(r, c) - mx * mx, vy = uyy(r, c) - my * my, vxy = uxy(r, c) - mx * my;
      total += ((2 * mx * my + c1) * (2 * vxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  return total / count;
}

double true_alignment(const Rotation3& ri, const Rotation3& rj) {
  const Eigen::Vector3d vi = viewing_direction(ri), vj = viewing_direction(rj);
  Eigen::Vector3d axis = vj.cross(vi);
  const double s = axis.norm(), c = std::clamp(vj.dot(vi), -1.0, 1.0);
  Eigen::Matrix3d q = Eigen::Matrix3d::Identity();
  if (s > 1e-12) {
    q = Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
  } else if (c < 0) {
    Eigen::Vector3d perp = vj.unitOrthogonal();
    q = Eigen::AngleAxisd(kPi, perp).toRotationMatrix();
  }
  const Eigen::Matrix3d m = ri.transpose() * q * rj;
  return std::atan2(m(1, 0), m(0, 0));
}

double wrap_degrees(double deg) {
  double r = std::remainder(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  return r;
}

std::size_t Histogram::total() const {
  std::size_t t = 0;
  for (std::size_t c : counts) t += c;
  return t;
}

std::size_t Histogram::bin(double value) const {
  const double pos = std::floor((value - lower) / bin_width);
  if (pos < 0) return 0;
  return std::min(static_cast<std::size_t>(pos), counts.size() - 1);
}

NeighborHistograms neighbor_histograms(const ViewGraph& graph, const DatasetManifest& manifest,
                                       double bin_width_deg) {
  if (!(bin_width_deg > 0)) throw Error(ErrorCode::kInvalidArgument, "neighbor_histograms: bin width must be positive");
  if (manifest.count() < graph.size())
    throw Error(ErrorCode::kMissingData, "neighbor_histograms: manifest lacks ground-truth orientations");
  NeighborHistograms h;
  const auto bins = static_cast<std::size_t>(std::ceil(180.0 / bin_width_deg - 1e-9));
  h.theta = {0.0, bin_width_deg, std::vector<std::size_t>(bins, 0)};
  h.alignment_error = {-180.0, bin_width_deg, std::vector<std::size_t>(2 * bins, 0)};
  const double deg = 180.0 / kPi;
  for (int i = 0; i < graph.size(); ++i) {
    const Rotation3& ri = manifest.rotations[static_cast<std::size_t>(i)];
    for (const GraphEdge& e : graph.neighbors(i)) {
      const Rotation3& rj = manifest.rotations[static_cast<std::size_t>(e.j)];
      const double theta = viewing_angle(viewing_direction(ri), viewing_direction(rj)) * deg;
      const double err = wrap_degrees((e.alpha - true_alignment(ri, rj)) * deg);
      h.theta_deg.push_back(theta);
      h.error_deg.push_back(err);
      ++h.theta.counts[h.theta.bin(theta)];
      ++h.alignment_error.counts[h.alignment_error.bin(err)];
    }
  }
  return h;
}

double true_neighbor_fraction(const ViewGraph& graph, const std::vector<Rotation3>& rotations,
                              double threshold_deg) {
  if (static_cast<int>(rotations.size()) < graph.size())
    throw Error(ErrorCode::kMissingData, "true_neighbor_fraction: missing orientations");
  std::size_t hits = 0, total = 0;
  const double limit = threshold_deg * kPi / 180.0;
  for (int i = 0; i < graph.size(); ++i)
    for (const GraphEdge& e : graph.neighbors(i)) {
      ++total;
      if (viewing_angle(viewing_direction(rotations[static_cast<std::size_t>(i)]),
                        viewing_direction(rotations[static_cast<std::size_t>(e.j)])) < limit)
        ++hits;
    }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

EvalReport evaluate_stack(const ImageStack& images, const ImageStack& reference, const SsimOptions& options) {
  if (images.size() != reference.size())
    throw Error(ErrorCode::kDimensionMismatch, "evaluate_stack: stack sizes differ");
  EvalReport report;
  report.rows.resize(images.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t i = 0; i < images.size(); ++i)
    report.rows[i] = {mse(images[i], reference[i]), psnr(images[i], reference[i]),
                      ssim(images[i], reference[i], options)};
  double finite_psnr = 0;
  std::size_t finite = 0;
  for (const ImageScores& row : report.rows) {
    report.mean.mse += row.mse;
    report.mean.ssim += row.ssim;
    if (std::isfinite(row.psnr)) {
      finite_psnr += row.psnr;
      ++finite;
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(report.rows.size(), 1));
  report.mean.mse /= n;
  report.mean.ssim /= n;
  report.mean.psnr = finite > 0 ? finite_psnr / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace mfvdm
