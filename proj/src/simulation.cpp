#include "mfvdm/simulation.hpp"

#include "mfvdm/fft.hpp"
#include "mfvdm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfvdm {

double Volume::sample(const Eigen::Vector3d& p) const {
  const double c = image_centre(size_);
  const double fx = p.x() + c, fy = p.y() + c, fz = p.z() + c;
  if (fx <= -1.0 || fy <= -1.0 || fz <= -1.0 || fx >= size_ || fy >= size_ || fz >= size_) return 0.0;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const int z0 = static_cast<int>(std::floor(fz));
  const double tx = fx - x0, ty = fy - y0, tz = fz - z0;
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const int z = z0 + dz;
    if (z < 0 || z >= size_) continue;
    const double wz = dz ? tz : 1.0 - tz;
    for (int dy = 0; dy < 2; ++dy) {
      const int y = y0 + dy;
      if (y < 0 || y >= size_) continue;
      const double wy = dy ? ty : 1.0 - ty;
      for (int dx = 0; dx < 2; ++dx) {
        const int x = x0 + dx;
        if (x < 0 || x >= size_) continue;
        const double wx = dx ? tx : 1.0 - tx;
        acc += wz * wy * wx * (*this)(z, y, x);
      }
    }
  }
  return acc;
}

namespace {

Eigen::Matrix3d quaternion_matrix(CounterRng& rng) {
  Eigen::Vector4d q;
  do {
    for (int i = 0; i < 4; ++i) q(i) = rng.normal();
  } while (q.norm() < 1e-12);
  q.normalize();
  return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
}

}  // namespace

Volume make_phantom(std::uint64_t seed, int n_blobs, const PhantomOptions& options) {
  if (n_blobs < 1) throw Error(ErrorCode::kInvalidArgument, "make_phantom: n_blobs must be >= 1");
  if (options.size < 3 || options.size % 2 == 0)
    throw Error(ErrorCode::kInvalidArgument, "make_phantom: size must be odd and >= 3");
  if (!(options.sigma_min > 0) || options.sigma_max < options.sigma_min ||
      options.radius < 5.5 * options.sigma_max)
    throw Error(ErrorCode::kInvalidArgument, "make_phantom: blob widths do not fit the radius");

  struct Blob {
    Eigen::Vector3d centre;
    Eigen::Matrix3d precision;
    double amplitude;
  };
  CounterRng rng(seed, rng_stream::kPhantom);
  std::vector<Blob> blobs;
  const double s0 = 0.5 * (options.sigma_min + options.sigma_max);
  blobs.push_back({Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity() / (s0 * s0), options.central_amplitude});
  for (int b = 1; b < n_blobs; ++b) {
    const Eigen::Matrix3d axes = quaternion_matrix(rng);
    Eigen::Vector3d sigma;
    for (int a = 0; a < 3; ++a) sigma(a) = rng.uniform(options.sigma_min, options.sigma_max);
    const double reach = options.radius - 5.5 * sigma.maxCoeff();
    Eigen::Vector3d centre;
    do {
      for (int a = 0; a < 3; ++a) centre(a) = rng.uniform(-reach, reach);
    } while (centre.norm() > reach);
    const Eigen::Matrix3d precision =
        axes * sigma.cwiseInverse().cwiseAbs2().asDiagonal() * axes.transpose();
    blobs.push_back({centre, precision, rng.uniform(0.4, 1.0)});
  }

  Volume vol(options.size);
  const double c = image_centre(options.size);
  for (int iz = 0; iz < options.size; ++iz)
    for (int iy = 0; iy < options.size; ++iy)
      for (int ix = 0; ix < options.size; ++ix) {
        const Eigen::Vector3d p(ix - c, iy - c, iz - c);
        double v = 0.0;
        for (const Blob& blob : blobs) {
          const Eigen::Vector3d d = p - blob.centre;
          v += blob.amplitude * std::exp(-0.5 * d.dot(blob.precision * d));
        }
        vol(iz, iy, ix) = v;
      }
  return vol;
}

Image project(const Volume& volume, const Rotation3& rotation) {
  const int n = volume.size();
  const double c = image_centre(n);
  const Eigen::Vector3d r1 = rotation.col(0), r2 = rotation.col(1), r3 = rotation.col(2);
  Image img(n, n);
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) {
      const Eigen::Vector3d base = (col - c) * r1 + (row - c) * r2;
      double acc = 0.0;
      for (int iz = 0; iz < n; ++iz) acc += volume.sample(base + (iz - c) * r3);
      img(row, col) = acc;
    }
  return img;
}

std::vector<Rotation3> sample_rotations(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample_rotations: n must be >= 1");
  CounterRng rng(seed, rng_stream::kRotations);
  std::vector<Rotation3> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(quaternion_matrix(rng));
  return out;
}

Rotation3 rotation_z(double angle) {
  Rotation3 r;
  const double ca = std::cos(angle), sa = std::sin(angle);
  r << ca, -sa, 0, sa, ca, 0, 0, 0, 1;
  return r;
}

void validate(const CTFProfile& p) {
  if (!(p.defocus_um > 0) || !(p.wavelength_a > 0) || !(p.cs_mm > 0) || !(p.pixel_size_a > 0))
    throw Error(ErrorCode::kInvalidArgument, "CTF profile: physical fields must be positive");
  if (!(p.amplitude_contrast >= 0 && p.amplitude_contrast < 1))
    throw Error(ErrorCode::kInvalidArgument, "CTF profile: amplitude contrast must lie in [0, 1)");
}

double ctf_value(const CTFProfile& p, double s) {
  if (s < 0) throw Error(ErrorCode::kInvalidArgument, "ctf_value: negative spatial frequency");
  const double dz = p.defocus_um * 1e4;
  const double cs = p.cs_mm * 1e7;
  const double lambda = p.wavelength_a;
  const double s2 = s * s;
  const double gamma = kPi * lambda * dz * s2 - 0.5 * kPi * cs * lambda * lambda * lambda * s2 * s2;
  const double w = p.amplitude_contrast;
  return -(std::sqrt(1.0 - w * w) * std::sin(gamma) + w * std::cos(gamma));
}

Image ctf_grid(const CTFProfile& profile, int size) {
  const double c = image_centre(size);
  Image g(size, size);
  for (int r = 0; r < size; ++r)
    for (int col = 0; col < size; ++col) {
      const double xi = std::hypot(r - c, col - c) / size;
      g(r, col) = ctf_value(profile, xi / profile.pixel_size_a);
    }
  return g;
}

Image apply_fourier_filter(const Image& image, const Image& filter) {
  if (image.rows() != filter.rows() || image.cols() != filter.cols())
    throw Error(ErrorCode::kDimensionMismatch, "filter grid does not match the image");
  FourierGrid f = fft::forward2(image);
  f.array() *= filter.array();
  return fft::inverse2(f);
}

Image apply_ctf(const Image& image, const CTFProfile& profile) {
  return apply_fourier_filter(image, ctf_grid(profile, static_cast<int>(image.rows())));
}

Image shift_image(const Image& image, double dx, double dy) {
  const int n = static_cast<int>(image.rows());
  const double c = image_centre(n);
  FourierGrid f = fft::forward2(image);
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) {
      const double phase = -kTwoPi * ((col - c) * dx + (r - c) * dy) / n;
      f(r, col) *= std::polar(1.0, phase);
    }
  return fft::inverse2(f);
}

Image noise_psd_grid(const NoiseModel& model, int size) {
  Image g = Image::Ones(size, size);
  if (model.kind == NoiseModel::Kind::kColored) {
    if (!(model.corner_frequency > 0))
      throw Error(ErrorCode::kInvalidArgument, "colored noise: corner frequency must be positive");
    const double c = image_centre(size);
    for (int r = 0; r < size; ++r)
      for (int col = 0; col < size; ++col) {
        const double rho = std::hypot(r - c, col - c) / size / model.corner_frequency;
        g(r, col) = 1.0 / (1.0 + rho * rho);
      }
    g /= g.mean();
  }
  return g;
}

Image unit_noise(int size, std::uint64_t seed, std::uint64_t index, const NoiseModel& model) {
  CounterRng rng(seed, rng_stream::kNoiseBase + index);
  Image z(size, size);
  for (int r = 0; r < size; ++r)
    for (int col = 0; col < size; ++col) z(r, col) = rng.normal();
  if (model.kind == NoiseModel::Kind::kWhite) return z;
  // A unit-mean PSD keeps the expected per-pixel variance at one.
  return apply_fourier_filter(z, noise_psd_grid(model, size).cwiseSqrt());
}

double dataset_variance(const ImageStack& stack) {
  if (stack.empty()) throw Error(ErrorCode::kInvalidArgument, "dataset_variance: empty stack");
  double sum = 0.0, count = 0.0;
  for (const Image& img : stack) {
    sum += img.sum();
    count += static_cast<double>(img.size());
  }
  const double mean = sum / count;
  double ss = 0.0;
  for (const Image& img : stack) ss += (img.array() - mean).square().sum();
  return ss / count;
}

ImageStack add_noise(const ImageStack& clean, double snr, std::uint64_t seed, const NoiseModel& model) {
  if (!(snr > 0)) throw Error(ErrorCode::kInvalidArgument, "add_noise: snr must be positive");
  ImageStack out(clean.size());
  if (std::isinf(snr)) {
    out = clean;
    return out;
  }
  const double sigma = std::sqrt(dataset_variance(clean) / snr);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const int n = static_cast<int>(clean[i].rows());
    out[i] = clean[i] + sigma * unit_noise(n, seed, i, model);
  }
  return out;
}

CleanDataset simulate_clean(const SimulationConfig& cfg) {
  if (cfg.count < 1) throw Error(ErrorCode::kInvalidArgument, "simulate: count must be >= 1");
  if (cfg.n_groups < 1) throw Error(ErrorCode::kInvalidArgument, "simulate: n_groups must be >= 1");
  if (!(cfg.defocus_min_um > 0) || cfg.defocus_max_um < cfg.defocus_min_um)
    throw Error(ErrorCode::kInvalidArgument, "simulate: defocus range is invalid");
  if (!(cfg.max_shift >= 0)) throw Error(ErrorCode::kInvalidArgument, "simulate: max_shift must be >= 0");

  PhantomOptions phantom_opts = cfg.phantom;
  phantom_opts.size = cfg.size;
  phantom_opts.radius = cfg.support_radius;
  const Volume volume = make_phantom(cfg.seed, cfg.n_blobs, phantom_opts);

  CleanDataset ds;
  DatasetManifest& m = ds.manifest;
  m.seed = cfg.seed;
  m.size = cfg.size;
  m.support_radius = cfg.support_radius;
  m.noise = cfg.noise;
  m.snr = std::numeric_limits<double>::infinity();
  for (int g = 0; g < cfg.n_groups; ++g) {
    CTFProfile p;
    const double t = cfg.n_groups == 1 ? 0.0 : static_cast<double>(g) / (cfg.n_groups - 1);
    p.defocus_um = cfg.defocus_min_um + t * (cfg.defocus_max_um - cfg.defocus_min_um);
    p.wavelength_a = cfg.wavelength_a;
    p.cs_mm = cfg.cs_mm;
    p.pixel_size_a = cfg.pixel_size_a;
    p.amplitude_contrast = cfg.amplitude_contrast;
    validate(p);
    m.groups.push_back(p);
  }
  m.rotations = sample_rotations(cfg.count, cfg.seed);
  CounterRng group_rng(cfg.seed, rng_stream::kDefocus);
  CounterRng shift_rng(cfg.seed, rng_stream::kShifts);
  for (int i = 0; i < cfg.count; ++i) {
    m.group_of.push_back(static_cast<int>(group_rng.next_u64() % static_cast<std::uint64_t>(cfg.n_groups)));
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    if (cfg.max_shift > 0) {
      s.x() = shift_rng.uniform(-cfg.max_shift, cfg.max_shift);
      s.y() = shift_rng.uniform(-cfg.max_shift, cfg.max_shift);
    }
    m.shifts.push_back(s);
  }

  std::vector<Image> group_ctfs;
  for (const CTFProfile& p : m.groups) group_ctfs.push_back(ctf_grid(p, cfg.size));

  ds.reference.resize(static_cast<std::size_t>(cfg.count));
  ds.ctf_clean.resize(static_cast<std::size_t>(cfg.count));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.count; ++i) {
    Image img = project(volume, m.rotations[static_cast<std::size_t>(i)]);
    const Eigen::Vector2d& s = m.shifts[static_cast<std::size_t>(i)];
    if (s.x() != 0.0 || s.y() != 0.0) img = shift_image(img, s.x(), s.y());
    ds.ctf_clean[static_cast<std::size_t>(i)] =
        apply_fourier_filter(img, group_ctfs[static_cast<std::size_t>(m.group_of[static_cast<std::size_t>(i)])]);
    ds.reference[static_cast<std::size_t>(i)] = std::move(img);
  }
  return ds;
}

std::vector<Image> ctf_grids(const DatasetManifest& manifest) {
  std::vector<Image> group_ctfs;
  for (const CTFProfile& p : manifest.groups) group_ctfs.push_back(ctf_grid(p, manifest.size));
  std::vector<Image> out;
  out.reserve(manifest.group_of.size());
  for (int g : manifest.group_of) {
    if (g < 0 || g >= static_cast<int>(group_ctfs.size()))
      throw Error(ErrorCode::kInvalidArgument, "manifest: defocus group out of range");
    out.push_back(group_ctfs[static_cast<std::size_t>(g)]);
  }
  return out;
}

std::vector<std::pair<int, int>> corner_pixels(int size, double corner_radius) {
  const double c = image_centre(size);
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < size; ++r)
    for (int col = 0; col < size; ++col)
      if (std::hypot(r - c, col - c) > corner_radius) out.emplace_back(r, col);
  return out;
}

Image estimate_noise_psd(const ImageStack& stack, double corner_radius) {
  if (stack.empty()) throw Error(ErrorCode::kMissingData, "whitening: empty stack");
  const int n = static_cast<int>(stack.front().rows());
  const auto corners = corner_pixels(n, corner_radius);
  if (corners.size() < 2) throw Error(ErrorCode::kMissingData, "whitening: no corner pixels outside the support radius");

  // Lag sums of corner products and of corner pairs through zero-padded transforms.
  const int padded = 2 * n - 1;
  Image mask = Image::Zero(padded, padded);
  for (const auto& [r, col] : corners) mask(r, col) = 1.0;
  FourierGrid products = FourierGrid::Zero(padded, padded);
  for (const Image& img : stack) {
    Image masked = Image::Zero(padded, padded);
    for (const auto& [r, col] : corners) masked(r, col) = img(r, col);
    products += fft::forward2(masked).cwiseAbs2().cast<Complex>();
  }
  const Image lag_sum = fft::inverse2(products);
  const Image pair_count = fft::inverse2(fft::forward2(mask).cwiseAbs2().cast<Complex>());

  // Radial autocorrelation, one value per squared lag length, Hann-tapered
  // beyond lag zero so the truncated sum stays smooth.
  const int max_lag = std::min((n - 1) / 2, 8);
  const int pc = (padded - 1) / 2;
  std::vector<double> acf_sum(static_cast<std::size_t>(max_lag * max_lag + 1), 0.0);
  std::vector<double> acf_pairs(acf_sum.size(), 0.0);
  for (int dy = -max_lag; dy <= max_lag; ++dy)
    for (int dx = -max_lag; dx <= max_lag; ++dx) {
      const int d2 = dx * dx + dy * dy;
      if (d2 > max_lag * max_lag) continue;
      acf_sum[static_cast<std::size_t>(d2)] += lag_sum(dy + pc, dx + pc);
      acf_pairs[static_cast<std::size_t>(d2)] += pair_count(dy + pc, dx + pc) * static_cast<double>(stack.size());
    }

  const double c = image_centre(n);
  Image psd = Image::Zero(n, n);
  for (int dy = -max_lag; dy <= max_lag; ++dy)
    for (int dx = -max_lag; dx <= max_lag; ++dx) {
      const int d2 = dx * dx + dy * dy;
      if (d2 > max_lag * max_lag || acf_pairs[static_cast<std::size_t>(d2)] < 0.5) continue;
      const double taper = 0.5 * (1.0 + std::cos(kPi * std::sqrt(static_cast<double>(d2)) / (max_lag + 1)));
      const double acf = taper * acf_sum[static_cast<std::size_t>(d2)] / acf_pairs[static_cast<std::size_t>(d2)];
      for (int r = 0; r < n; ++r)
        for (int col = 0; col < n; ++col)
          psd(r, col) += acf * std::cos(kTwoPi * ((col - c) * dx + (r - c) * dy) / n);
    }
  const double peak = psd.maxCoeff();
  if (!(peak > 0)) throw Error(ErrorCode::kMissingData, "whitening: corner regions carry no noise");
  psd = psd.cwiseMax(1e-3 * peak);
  return psd / psd.mean();
}

Image phase_flip(const Image& image, const Image& ctf) {
  return apply_fourier_filter(image, ctf.unaryExpr([](double v) { return v < 0 ? -1.0 : 1.0; }));
}

PreprocessResult preprocess(const ImageStack& stack, const std::vector<Image>& ctfs,
                            const PreprocessOptions& options) {
  PreprocessResult out;
  out.images = stack;
  out.offsets.assign(stack.size(), 0.0);
  out.scales.assign(stack.size(), 1.0);
  if (stack.empty()) return out;
  const int n = static_cast<int>(stack.front().rows());
  for (const Image& img : stack)
    if (img.rows() != n || img.cols() != n)
      throw Error(ErrorCode::kDimensionMismatch, "preprocess: images differ in size");
  if (options.phase_flip && ctfs.size() != stack.size())
    throw Error(ErrorCode::kDimensionMismatch, "preprocess: one CTF per image is required for phase flipping");

  if (options.standardize) {
    const auto corners = corner_pixels(n, options.corner_radius);
    if (corners.size() < 2)
      throw Error(ErrorCode::kMissingData, "standardize: no corner pixels outside the support radius");
    for (std::size_t i = 0; i < stack.size(); ++i) {
      double s = 0.0, ss = 0.0;
      for (const auto& [r, col] : corners) s += stack[i](r, col);
      const double mean = s / static_cast<double>(corners.size());
      for (const auto& [r, col] : corners) ss += (stack[i](r, col) - mean) * (stack[i](r, col) - mean);
      const double sd = std::sqrt(ss / static_cast<double>(corners.size() - 1));
      out.offsets[i] = mean;
      out.scales[i] = sd > 1e-12 ? sd : 1.0;
      out.images[i] = (stack[i].array() - mean) / out.scales[i];
    }
  }

  if (options.whiten) {
    // A per-image mean removal biases every autocorrelation lag; estimate
    // after removing only the stack-wide corner mean.
    const auto corners = corner_pixels(n, options.corner_radius);
    double mean = 0.0;
    for (std::size_t i = 0; i < stack.size(); ++i)
      for (const auto& [r, col] : corners) mean += stack[i](r, col);
    mean /= static_cast<double>(corners.size() * stack.size());
    ImageStack centred(stack.size());
    for (std::size_t i = 0; i < stack.size(); ++i) centred[i] = (stack[i].array() - mean) / out.scales[i];
    out.noise_psd = estimate_noise_psd(centred, options.corner_radius);
    const Image inv_sqrt = out.noise_psd->cwiseSqrt().cwiseInverse();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < out.images.size(); ++i) out.images[i] = apply_fourier_filter(out.images[i], inv_sqrt);
  }

  if (options.phase_flip) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < out.images.size(); ++i) out.images[i] = phase_flip(out.images[i], ctfs[i]);
  }
  return out;
}

}  // namespace mfvdm
