#pragma once

#include "mfvdm/common.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace mfvdm {

/// Particle orientation R = [R1 R2 R3]; the viewing direction is R3.
using Rotation3 = Eigen::Matrix3d;

inline Eigen::Vector3d viewing_direction(const Rotation3& r) { return r.col(2); }

/// Cubic L x L x L grid. Voxel (iz, iy, ix) sits at (ix - c, iy - c, iz - c).
class Volume {
 public:
  Volume() = default;
  explicit Volume(int size)
      : size_(size), data_(static_cast<std::size_t>(size) * size * size, 0.0) {}

  int size() const { return size_; }
  double& operator()(int iz, int iy, int ix) { return data_[offset(iz, iy, ix)]; }
  double operator()(int iz, int iy, int ix) const { return data_[offset(iz, iy, ix)]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// Trilinear interpolation at a point in the centred frame; zero outside.
  double sample(const Eigen::Vector3d& p) const;

 private:
  std::size_t offset(int iz, int iy, int ix) const {
    return (static_cast<std::size_t>(iz) * size_ + iy) * size_ + ix;
  }

  int size_ = 0;
  std::vector<double> data_;
};

struct PhantomOptions {
  int size = 33;
  double radius = 14.0;  // every blob keeps 5.5 of its widest standard deviations inside
  double sigma_min = 1.2;
  double sigma_max = 1.6;
  double central_amplitude = 0.5;
};

/// Sum of anisotropic Gaussian blobs. Blob 0 is isotropic and centred; the
/// others have random centres, axes and amplitudes drawn from the seed.
Volume make_phantom(std::uint64_t seed, int n_blobs, const PhantomOptions& options = {});

/// Line integrals I(x, y) = sum_z phi(x R1 + y R2 + z R3) over unit steps z = -c..c,
/// with trilinear interpolation. Pixel (row, col) maps to x = col - c, y = row - c.
Image project(const Volume& volume, const Rotation3& rotation);

/// Haar-distributed rotations from normalised Gaussian quaternions.
std::vector<Rotation3> sample_rotations(int n, std::uint64_t seed);

/// Rotation about the z axis by angle (counter-clockwise).
Rotation3 rotation_z(double angle);

struct CTFProfile {
  double defocus_um = 1.0;
  double wavelength_a = 0.025;
  double cs_mm = 2.0;
  double pixel_size_a = 2.82;
  double amplitude_contrast = 0.07;
};

/// Throws Error(kInvalidArgument) if a physical field is not positive or the
/// amplitude contrast is outside [0, 1).
void validate(const CTFProfile& profile);

/// Weak-phase CTF at spatial frequency s (1/Angstrom):
/// -(sqrt(1 - w^2) sin gamma + w cos gamma),
/// gamma = pi lambda dz s^2 - (pi / 2) cs lambda^3 s^4.
double ctf_value(const CTFProfile& profile, double spatial_freq);

/// CTF on the centred L x L Fourier grid.
Image ctf_grid(const CTFProfile& profile, int size);

/// Pointwise product of the image spectrum with the grid (same size), real part back.
Image apply_fourier_filter(const Image& image, const Image& filter);
Image apply_ctf(const Image& image, const CTFProfile& profile);

/// Sub-pixel translation by (dx, dy) pixels through a Fourier phase ramp.
Image shift_image(const Image& image, double dx, double dy);

struct NoiseModel {
  enum class Kind { kWhite, kColored };
  Kind kind = Kind::kWhite;
  /// Colored PSD 1 / (1 + (rho / corner)^2), rho in cycles/pixel.
  double corner_frequency = 0.1;
};

/// Radial noise PSD of the model on the centred grid, scaled to unit mean.
Image noise_psd_grid(const NoiseModel& model, int size);

/// Unit-variance noise field for image `index`: draws from stream
/// kNoiseBase + index, so rescaling gives the same realization at every SNR.
Image unit_noise(int size, std::uint64_t seed, std::uint64_t index, const NoiseModel& model);

/// Variance of all pixels of the stack about their common mean.
double dataset_variance(const ImageStack& stack);

/// clean[i] + sigma * unit_noise(i) with sigma^2 = dataset_variance(clean) / snr.
ImageStack add_noise(const ImageStack& clean, double snr, std::uint64_t seed, const NoiseModel& model);

struct SimulationConfig {
  int size = 33;
  int count = 1000;
  double support_radius = 14.0;
  std::uint64_t seed = 1;
  int n_blobs = 12;
  PhantomOptions phantom;
  int n_groups = 20;
  double defocus_min_um = 1.0;
  double defocus_max_um = 4.0;
  double wavelength_a = 0.025;
  double cs_mm = 2.0;
  double pixel_size_a = 2.82 * 129.0 / 33.0;
  double amplitude_contrast = 0.07;
  double max_shift = 0.0;  // uniform in [-max_shift, max_shift] pixels per axis
  NoiseModel noise;
};

/// Ground truth for one simulated stack.
struct DatasetManifest {
  std::uint64_t seed = 0;
  int size = 0;
  double support_radius = 0;
  NoiseModel noise;
  double snr = 0;  // +infinity for noise-free stacks
  std::vector<CTFProfile> groups;
  std::vector<Rotation3> rotations;
  std::vector<int> group_of;
  std::vector<Eigen::Vector2d> shifts;

  int count() const { return static_cast<int>(rotations.size()); }
};

struct CleanDataset {
  ImageStack reference;  // projections after shift, before CTF
  ImageStack ctf_clean;  // reference with the group CTF applied
  DatasetManifest manifest;
};

/// Projections of the seed's phantom at Haar-random orientations, shifted and
/// CTF-modulated. Defocus groups are spaced uniformly over [min, max]; each
/// image draws its group uniformly.
CleanDataset simulate_clean(const SimulationConfig& config);

/// CTF grid of every image in the manifest.
std::vector<Image> ctf_grids(const DatasetManifest& manifest);

struct PreprocessOptions {
  bool standardize = true;
  bool whiten = false;
  bool phase_flip = true;
  double corner_radius = 14.0;  // pixels with distance > corner_radius from the centre
};

struct PreprocessResult {
  ImageStack images;
  std::vector<double> offsets;  // per image, subtracted before scaling
  std::vector<double> scales;   // per image, divided after subtracting the offset
  std::optional<Image> noise_psd;  // whitening PSD on the centred grid, unit mean
};

/// Corner-region mask of an L x L image.
std::vector<std::pair<int, int>> corner_pixels(int size, double corner_radius);

/// Radial noise PSD from the corner-pixel autocorrelation, averaged over the
/// stack and normalised to unit mean on the grid. Corner values are used as
/// given, so any mean should be removed beforehand. Throws Error(kMissingData)
/// without corners.
Image estimate_noise_psd(const ImageStack& stack, double corner_radius);

/// Standardization from corner statistics, optional whitening, optional phase
/// flipping by sign(ctf) with sign(0) = +1. ctfs may be empty when phase
/// flipping is off.
PreprocessResult preprocess(const ImageStack& stack, const std::vector<Image>& ctfs,
                            const PreprocessOptions& options);

/// Multiplies the spectrum by sign(ctf).
Image phase_flip(const Image& image, const Image& ctf);

}  // namespace mfvdm
