#include "mfvdm/steerable_basis.hpp"

#include "mfvdm/fft.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>

namespace mfvdm {
namespace {

Complex minus_i_power(int k) {
  switch (std::abs(k) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

double bessel_j(int order, double x) { return std::cyl_bessel_j(static_cast<double>(order), x); }

}  // namespace

void gauss_legendre(int count, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int i = 1; i < count; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = beta;
    jacobi(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes.resize(static_cast<std::size_t>(count));
  weights.resize(static_cast<std::size_t>(count));
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < count; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    nodes[static_cast<std::size_t>(i)] = mid + half * solver.eigenvalues()(i);
    weights[static_cast<std::size_t>(i)] = 2.0 * v0 * v0 * half;
  }
}

double BasisTables::bessel_zero(int k, int q) const {
  return zeros_.at(static_cast<std::size_t>(std::abs(k))).at(static_cast<std::size_t>(q - 1));
}

double BasisTables::radial(int k, int q, double radius) const {
  if (radius > bandlimit_) return 0.0;
  const auto ak = static_cast<std::size_t>(std::abs(k));
  const auto qi = static_cast<std::size_t>(q - 1);
  return norms_[ak][qi] * bessel_j(std::abs(k), zeros_[ak][qi] * radius / bandlimit_);
}

Complex BasisTables::evaluate(int k, int q, double radius, double angle) const {
  const double r = radial(k, q, radius);
  return r * minus_i_power(k) * std::polar(1.0, k * angle);
}

int BasisTables::full_index(int k, int q) const {
  return full_offsets_[static_cast<std::size_t>(k + k_max())] + q - 1;
}

BasisPtr build_basis(int image_size, double bandlimit, double support_radius) {
  if (image_size < 3 || image_size % 2 == 0)
    throw Error(ErrorCode::kInvalidArgument, "build_basis: image size must be odd and >= 3");
  if (!(bandlimit > 0.0 && bandlimit <= 0.5))
    throw Error(ErrorCode::kInvalidArgument, "build_basis: bandlimit must lie in (0, 0.5]");
  if (!(support_radius > 0.0 && support_radius <= 0.5 * (image_size - 1)))
    throw Error(ErrorCode::kInvalidArgument, "build_basis: support radius must lie in (0, (L-1)/2]");

  auto tables = std::shared_ptr<BasisTables>(new BasisTables());
  BasisTables& b = *tables;
  b.image_size_ = image_size;
  b.bandlimit_ = bandlimit;
  b.support_radius_ = support_radius;

  const double limit = kTwoPi * bandlimit * support_radius;
  for (int k = 0;; ++k) {
    std::vector<double> zeros;
    for (int q = 1;; ++q) {
      const double z = boost::math::cyl_bessel_j_zero(static_cast<double>(k), q);
      if (z > limit) break;
      zeros.push_back(z);
    }
    if (zeros.empty()) break;
    std::vector<double> norms;
    for (double z : zeros)
      norms.push_back(1.0 / (std::sqrt(kPi) * bandlimit * std::abs(bessel_j(k + 1, z))));
    b.radial_counts_.push_back(static_cast<int>(zeros.size()));
    b.zeros_.push_back(std::move(zeros));
    b.norms_.push_back(std::move(norms));
  }
  if (b.radial_counts_.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "build_basis: no Bessel zero satisfies z <= 2 pi kappa R; increase kappa or R");

  const int k_max = b.k_max();
  b.offsets_.assign(1, 0);
  for (int k = 0; k <= k_max; ++k) b.offsets_.push_back(b.offsets_.back() + b.radial_count(k));
  b.full_offsets_.clear();
  int full = 0;
  for (int k = -k_max; k <= k_max; ++k) {
    b.full_offsets_.push_back(full);
    full += b.radial_count(k);
  }

  // The product of two radial factors oscillates at most twice as fast as one;
  // limit + 32 Gauss nodes integrate it to well below 1e-10.
  const int radial_nodes = static_cast<int>(std::ceil(limit)) + 32;
  gauss_legendre(radial_nodes, 0.0, bandlimit, b.quadrature_.radii, b.quadrature_.radial_weights);
  for (std::size_t i = 0; i < b.quadrature_.radii.size(); ++i)
    b.quadrature_.radial_weights[i] *= b.quadrature_.radii[i];
  b.quadrature_.angular_count = 4 * k_max + 8;

  const int c = image_size / 2;
  for (int r = 0; r < image_size; ++r) {
    for (int col = 0; col < image_size; ++col) {
      const double fx = static_cast<double>(col - c) / image_size;
      const double fy = static_cast<double>(r - c) / image_size;
      if (std::hypot(fx, fy) <= bandlimit * (1.0 + 1e-12)) {
        b.grid_rows_.push_back(r);
        b.grid_cols_.push_back(col);
      }
    }
  }
  const auto points = static_cast<Eigen::Index>(b.grid_rows_.size());
  b.grid_values_.resize(points, full);
  for (Eigen::Index p = 0; p < points; ++p) {
    const double fx = static_cast<double>(b.grid_cols_[p] - c) / image_size;
    const double fy = static_cast<double>(b.grid_rows_[p] - c) / image_size;
    const double rho = std::hypot(fx, fy);
    const double theta = std::atan2(fy, fx);
    for (int k = 0; k <= k_max; ++k) {
      for (int q = 1; q <= b.radial_count(k); ++q) {
        const double radial = b.radial(k, q, rho);
        b.grid_values_(p, b.full_index(k, q)) = radial * minus_i_power(k) * std::polar(1.0, k * theta);
        if (k > 0)
          b.grid_values_(p, b.full_index(-k, q)) = radial * minus_i_power(k) * std::polar(1.0, -k * theta);
      }
    }
  }
  b.grid_pinv_ = b.grid_values_.completeOrthogonalDecomposition().pseudoInverse();
  return tables;
}

FBCoeffs::FBCoeffs(BasisPtr basis, Eigen::VectorXcd values)
    : basis_(std::move(basis)), values_(std::move(values)) {
  if (!basis_ || values_.size() != basis_->count())
    throw Error(ErrorCode::kDimensionMismatch, "FBCoeffs: coefficient count does not match basis");
}

FBCoeffs::FBCoeffs(BasisPtr basis) : basis_(std::move(basis)) {
  if (!basis_) throw Error(ErrorCode::kInvalidArgument, "FBCoeffs: null basis");
  values_ = Eigen::VectorXcd::Zero(basis_->count());
}

Complex FBCoeffs::at(int k, int q) const {
  const Complex v = values_(basis_->index(std::abs(k), q));
  return k < 0 ? std::conj(v) : v;
}

std::span<const Complex> FBCoeffs::block(int k) const {
  return {values_.data() + basis_->offset(k), static_cast<std::size_t>(basis_->radial_count(k))};
}

double FBCoeffs::squared_norm() const {
  double total = 0.0;
  for (int k = 0; k <= basis_->k_max(); ++k) {
    double block_sum = 0.0;
    for (const Complex& v : block(k)) block_sum += std::norm(v);
    total += (k == 0 ? 1.0 : 2.0) * block_sum;
  }
  return total;
}

FBCoeffs expand_fourier(const FourierGrid& grid, const BasisPtr& basis) {
  const int n = basis->image_size();
  if (grid.rows() != n || grid.cols() != n)
    throw Error(ErrorCode::kDimensionMismatch, "expand: grid size does not match basis image size");
  const auto points = static_cast<Eigen::Index>(basis->grid_rows().size());
  Eigen::VectorXcd samples(points);
  for (Eigen::Index p = 0; p < points; ++p) samples(p) = grid(basis->grid_rows()[p], basis->grid_cols()[p]);
  const Eigen::VectorXcd full = basis->grid_pseudo_inverse() * samples;

  FBCoeffs out(basis);
  for (int k = 0; k <= basis->k_max(); ++k) {
    for (int q = 1; q <= basis->radial_count(k); ++q) {
      const Complex pos = full(basis->full_index(k, q));
      const Complex neg = full(basis->full_index(-k, q));
      out.ref(k, q) = k == 0 ? Complex(0.5 * (pos + neg).real(), 0.0) : 0.5 * (pos + std::conj(neg));
    }
  }
  return out;
}

FBCoeffs expand(const Image& image, const BasisPtr& basis) {
  if (image.rows() != basis->image_size() || image.cols() != basis->image_size())
    throw Error(ErrorCode::kDimensionMismatch, "expand: image size does not match basis image size");
  return expand_fourier(fft::forward2(image), basis);
}

FourierGrid reconstruct_fourier(const FBCoeffs& coeffs) {
  const BasisTables& b = *coeffs.basis();
  Eigen::VectorXcd full(b.grid_values().cols());
  for (int k = 0; k <= b.k_max(); ++k) {
    for (int q = 1; q <= b.radial_count(k); ++q) {
      const Complex v = coeffs.at(k, q);
      full(b.full_index(k, q)) = v;
      if (k > 0) full(b.full_index(-k, q)) = std::conj(v);
    }
  }
  const Eigen::VectorXcd samples = b.grid_values() * full;
  FourierGrid grid = FourierGrid::Zero(b.image_size(), b.image_size());
  for (Eigen::Index p = 0; p < samples.size(); ++p) grid(b.grid_rows()[p], b.grid_cols()[p]) = samples(p);
  return grid;
}

Image reconstruct(const FBCoeffs& coeffs) { return fft::inverse2(reconstruct_fourier(coeffs)); }

double reconstruct_imaginary_residue(const FBCoeffs& coeffs) {
  const FourierGrid spatial = fft::inverse2_complex(reconstruct_fourier(coeffs));
  const double re = spatial.real().cwiseAbs().maxCoeff();
  const double im = spatial.imag().cwiseAbs().maxCoeff();
  return re > 0.0 ? im / re : im;
}

FBCoeffs rotate_coeffs(const FBCoeffs& coeffs, double alpha) {
  FBCoeffs out = coeffs;
  const BasisTables& b = *coeffs.basis();
  for (int k = 1; k <= b.k_max(); ++k) {
    const Complex phase = std::polar(1.0, -k * alpha);
    for (int q = 1; q <= b.radial_count(k); ++q) out.ref(k, q) *= phase;
  }
  return out;
}

namespace {

bool lexicographically_less(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

RidResult rid_align_ordered(const FBCoeffs& a, const FBCoeffs& b, int fft_size) {
  const BasisTables& basis = *a.basis();
  std::vector<Complex> buffer(static_cast<std::size_t>(fft_size), Complex{});
  for (int k = 0; k <= basis.k_max(); ++k) {
    const auto ak = a.block(k);
    const auto bk = b.block(k);
    Complex c{};
    for (std::size_t q = 0; q < ak.size(); ++q) c += ak[q] * std::conj(bk[q]);
    buffer[static_cast<std::size_t>(k)] = k == 0 ? Complex(c.real(), 0.0) : 2.0 * c;
  }
  fft::dft(buffer, buffer, /*forward=*/false);
  std::size_t best = 0;
  for (std::size_t t = 1; t < buffer.size(); ++t)
    if (buffer[t].real() > buffer[best].real()) best = t;
  const double d2 = a.squared_norm() + b.squared_norm() - 2.0 * buffer[best].real();
  return {std::sqrt(std::max(d2, 0.0)), wrap_angle(kTwoPi * static_cast<double>(best) / fft_size)};
}

}  // namespace

RidResult rid_align(const FBCoeffs& coeffs_i, const FBCoeffs& coeffs_j, int fft_size) {
  if (coeffs_i.basis() != coeffs_j.basis())
    throw Error(ErrorCode::kDimensionMismatch, "rid_align: coefficients use different bases");
  if (fft_size < 2 * coeffs_i.basis()->k_max() + 1)
    throw Error(ErrorCode::kInvalidArgument, "rid_align: fft_size must be at least 2 k_max + 1");
  // Evaluate in a canonical order so that swapping the arguments is exact.
  if (lexicographically_less(coeffs_j.values(), coeffs_i.values())) {
    RidResult r = rid_align_ordered(coeffs_j, coeffs_i, fft_size);
    r.angle = wrap_angle(-r.angle);
    return r;
  }
  return rid_align_ordered(coeffs_i, coeffs_j, fft_size);
}

Eigen::VectorXd coefficient_noise_variance(const BasisTables& basis) {
  // White noise of unit variance has variance L^2 at every Fourier grid point.
  const double grid_variance = static_cast<double>(basis.image_size()) * basis.image_size();
  Eigen::VectorXd out(basis.count());
  for (int k = 0; k <= basis.k_max(); ++k)
    for (int q = 1; q <= basis.radial_count(k); ++q)
      out(basis.index(k, q)) = grid_variance * basis.grid_pseudo_inverse().row(basis.full_index(k, q)).squaredNorm();
  return out;
}

std::vector<Eigen::MatrixXd> radial_filter_blocks(const BasisTables& basis,
                                                  const std::function<double(double)>& f) {
  const DiskQuadrature& quad = basis.quadrature();
  const auto nodes = static_cast<Eigen::Index>(quad.radii.size());
  Eigen::VectorXd w(nodes);
  for (Eigen::Index j = 0; j < nodes; ++j)
    w(j) = kTwoPi * quad.radial_weights[static_cast<std::size_t>(j)] * f(quad.radii[static_cast<std::size_t>(j)]);
  std::vector<Eigen::MatrixXd> blocks;
  for (int k = 0; k <= basis.k_max(); ++k) {
    Eigen::MatrixXd radial(basis.radial_count(k), nodes);
    for (int q = 1; q <= basis.radial_count(k); ++q)
      for (Eigen::Index j = 0; j < nodes; ++j) radial(q - 1, j) = basis.radial(k, q, quad.radii[static_cast<std::size_t>(j)]);
    blocks.push_back(radial * w.asDiagonal() * radial.transpose());
  }
  return blocks;
}

FBCoeffs apply_radial_filter(const FBCoeffs& coeffs, const std::vector<Eigen::MatrixXd>& blocks) {
  const BasisTables& b = *coeffs.basis();
  if (static_cast<int>(blocks.size()) != b.k_max() + 1)
    throw Error(ErrorCode::kDimensionMismatch, "apply_radial_filter: one block per angular frequency is required");
  FBCoeffs out(coeffs.basis());
  for (int k = 0; k <= b.k_max(); ++k) {
    const int p = b.radial_count(k);
    if (blocks[static_cast<std::size_t>(k)].rows() != p || blocks[static_cast<std::size_t>(k)].cols() != p)
      throw Error(ErrorCode::kDimensionMismatch, "apply_radial_filter: block size differs from p_k");
    out.values().segment(b.offset(k), p) =
        blocks[static_cast<std::size_t>(k)].cast<Complex>() * coeffs.values().segment(b.offset(k), p);
  }
  return out;
}

Eigen::MatrixXcd quadrature_gram(const BasisTables& basis) {
  const DiskQuadrature& quad = basis.quadrature();
  const int count = basis.count();
  const auto nodes = quad.radii.size();
  // Radial table: one row per stored function.
  Eigen::MatrixXd radial(count, static_cast<Eigen::Index>(nodes));
  std::vector<int> orders(static_cast<std::size_t>(count));
  for (int k = 0; k <= basis.k_max(); ++k) {
    for (int q = 1; q <= basis.radial_count(k); ++q) {
      const int row = basis.index(k, q);
      orders[static_cast<std::size_t>(row)] = k;
      for (std::size_t j = 0; j < nodes; ++j)
        radial(row, static_cast<Eigen::Index>(j)) = basis.radial(k, q, quad.radii[j]);
    }
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(nodes));
  for (std::size_t j = 0; j < nodes; ++j) w(static_cast<Eigen::Index>(j)) = quad.radial_weights[j];
  const Eigen::MatrixXd radial_gram = radial * w.asDiagonal() * radial.transpose();

  // Angular factor: (2 pi / T) sum_t e^{i d theta_t}, summed explicitly.
  const int t_count = quad.angular_count;
  const int k_max = basis.k_max();
  std::vector<Complex> angular(static_cast<std::size_t>(2 * k_max + 1));
  for (int d = -k_max; d <= k_max; ++d) {
    Complex s{};
    for (int t = 0; t < t_count; ++t) s += std::polar(1.0, d * kTwoPi * t / t_count);
    angular[static_cast<std::size_t>(d + k_max)] = s * (kTwoPi / t_count);
  }
  Eigen::MatrixXcd gram(count, count);
  for (int a = 0; a < count; ++a) {
    for (int b = 0; b < count; ++b) {
      const int ka = orders[static_cast<std::size_t>(a)];
      const int kb = orders[static_cast<std::size_t>(b)];
      const Complex phase = std::conj(minus_i_power(ka)) * minus_i_power(kb);
      gram(a, b) = radial_gram(a, b) * phase * angular[static_cast<std::size_t>(kb - ka + k_max)];
    }
  }
  return gram;
}

}  // namespace mfvdm
