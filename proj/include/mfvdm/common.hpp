#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfvdm {

using Complex = std::complex<double>;

/// Real image, row-major. Pixel (row, col) sits at x = col - c, y = row - c with
/// c = (L - 1) / 2, so the image centre is the origin of the (x, y) frame.
using Image = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Centred Fourier grid: entry (ky + c, kx + c) holds the transform at
/// frequency (kx, ky) / L cycles per pixel.
using FourierGrid = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ImageStack = std::vector<Image>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kIsolatedNode,
  kNonConvergence,
  kMissingData,
  kIo,
  kConfig,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kIsolatedNode: return "isolated_node";
    case ErrorCode::kNonConvergence: return "non_convergence";
    case ErrorCode::kMissingData: return "missing_data";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

inline double image_centre(int size) { return 0.5 * (size - 1); }

}  // namespace mfvdm
