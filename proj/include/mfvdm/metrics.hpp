#pragma once

#include "mfvdm/common.hpp"
#include "mfvdm/initial_graph.hpp"
#include "mfvdm/simulation.hpp"

#include <cstddef>
#include <vector>

namespace mfvdm {

/// Mean of squared differences. Throws Error(kDimensionMismatch) on size mismatch.
double mse(const Image& x, const Image& ref);

/// 10 log10(peak^2 / mse) with peak = max(ref) - min(ref); +infinity when mse = 0.
/// Throws Error(kInvalidArgument) when ref is constant.
double psnr(const Image& x, const Image& ref);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Windowed SSIM with a Gaussian window (symmetric reflection at the border),
/// dynamic range max(ref) - min(ref), averaged over windows that lie fully
/// inside the image.
double ssim(const Image& x, const Image& ref, const SsimOptions& options = {});

/// In-plane angle registering image j onto image i (counter-clockwise rotation
/// of j), from the orientations: R_j is carried to the viewing direction of
/// R_i by the minimal rotation, and the residual rotation about v_i is read off.
double true_alignment(const Rotation3& ri, const Rotation3& rj);

/// Angle in degrees wrapped to (-180, 180].
double wrap_degrees(double deg);

struct Histogram {
  double lower = 0;
  double bin_width = 1;
  std::vector<std::size_t> counts;

  std::size_t total() const;
  /// Bin of a value, clamped to the histogram range.
  std::size_t bin(double value) const;
};

struct NeighborHistograms {
  Histogram theta;            // viewing angle in degrees over [0, 180]
  Histogram alignment_error;  // wrapped alpha_hat - alpha_true in degrees over (-180, 180]
  std::vector<double> theta_deg;
  std::vector<double> error_deg;
};

/// One sample per stored edge. Throws Error(kMissingData) if the manifest has
/// no orientation for a node.
NeighborHistograms neighbor_histograms(const ViewGraph& graph, const DatasetManifest& manifest,
                                       double bin_width_deg = 1.0);

/// Fraction of stored edges with viewing angle below threshold_deg.
double true_neighbor_fraction(const ViewGraph& graph, const std::vector<Rotation3>& rotations,
                              double threshold_deg);

struct ImageScores {
  double mse = 0;
  double psnr = 0;
  double ssim = 0;
};

struct EvalReport {
  std::vector<ImageScores> rows;
  ImageScores mean;
};

/// Per-image scores and their means. Infinite PSNR rows are excluded from the
/// PSNR mean; if every row is infinite the mean is infinite.
EvalReport evaluate_stack(const ImageStack& images, const ImageStack& reference,
                          const SsimOptions& options = {});

}  // namespace mfvdm
