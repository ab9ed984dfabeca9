#pragma once

#include "mfvdm/common.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace mfvdm {

/// Tensor-product quadrature on the Fourier disk of radius kappa:
/// Gauss-Legendre in the radius times uniform nodes in the angle.
struct DiskQuadrature {
  std::vector<double> radii;           // cycles/pixel, in (0, kappa)
  std::vector<double> radial_weights;  // include the Jacobian r
  int angular_count = 0;               // uniform nodes 2 pi t / angular_count
};

/// Fourier-Bessel tables for L x L images, band limit kappa, support radius R.
///
/// Basis functions live in the Fourier domain on the disk |xi| <= kappa:
///
///   psi_{k,q}(xi, theta) = N_{k,q} (-i)^{|k|} J_{|k|}(z_{|k|,q} xi / kappa) e^{i k theta},
///   N_{k,q} = 1 / (sqrt(pi) kappa |J_{|k|+1}(z_{|k|,q})|),
///
/// where z_{k,q} is the q-th positive zero of J_k. They are orthonormal in
/// L2 of the disk. The (-i)^{|k|} factor makes real images carry coefficients
/// with a_{-k,q} = conj(a_{k,q}). A pair (k, q) is retained iff
/// z_{|k|,q} <= 2 pi kappa R.
///
/// Immutable after construction; share through std::shared_ptr<const BasisTables>.
class BasisTables {
 public:
  int image_size() const { return image_size_; }
  double bandlimit() const { return bandlimit_; }
  double support_radius() const { return support_radius_; }
  int k_max() const { return static_cast<int>(radial_counts_.size()) - 1; }
  int radial_count(int k) const { return radial_counts_.at(static_cast<std::size_t>(std::abs(k))); }
  const std::vector<int>& radial_counts() const { return radial_counts_; }
  double bessel_zero(int k, int q) const;  // q is 1-based
  const DiskQuadrature& quadrature() const { return quadrature_; }

  /// Number of stored (k >= 0) coefficients.
  int count() const { return offsets_.back(); }
  /// Flat index of (k, q) in the k >= 0 storage; q is 1-based.
  int index(int k, int q) const { return offsets_[static_cast<std::size_t>(k)] + q - 1; }
  int offset(int k) const { return offsets_[static_cast<std::size_t>(k)]; }

  /// psi_{k,q} at polar frequency (radius in cycles/pixel, angle in radians).
  Complex evaluate(int k, int q, double radius, double angle) const;
  /// Radial factor N_{k,q} J_{|k|}(z xi / kappa), zero outside the disk.
  double radial(int k, int q, double radius) const;

  // Cartesian Fourier grid support: centred grid points with |xi| <= kappa.
  const std::vector<int>& grid_rows() const { return grid_rows_; }
  const std::vector<int>& grid_cols() const { return grid_cols_; }
  /// grid_points x full-basis values; full basis index runs over k = -k_max..k_max.
  const Eigen::MatrixXcd& grid_values() const { return grid_values_; }
  /// Least-squares inverse of grid_values.
  const Eigen::MatrixXcd& grid_pseudo_inverse() const { return grid_pinv_; }
  /// Column of (k, q) in the full-basis ordering.
  int full_index(int k, int q) const;

  friend std::shared_ptr<const BasisTables> build_basis(int image_size, double bandlimit,
                                                        double support_radius);

 private:
  BasisTables() = default;

  int image_size_ = 0;
  double bandlimit_ = 0;
  double support_radius_ = 0;
  std::vector<int> radial_counts_;
  std::vector<std::vector<double>> zeros_;
  std::vector<std::vector<double>> norms_;
  std::vector<int> offsets_;
  DiskQuadrature quadrature_;
  std::vector<int> grid_rows_, grid_cols_;
  Eigen::MatrixXcd grid_values_;
  Eigen::MatrixXcd grid_pinv_;
  std::vector<int> full_offsets_;  // start of k in the full ordering, index k + k_max
};

using BasisPtr = std::shared_ptr<const BasisTables>;

/// Throws Error(kInvalidArgument) for even or too small L, kappa outside
/// (0, 0.5], or R outside (0, (L-1)/2].
BasisPtr build_basis(int image_size, double bandlimit, double support_radius);

/// Expansion coefficients a_{k,q} of one real image, k >= 0 stored.
class FBCoeffs {
 public:
  FBCoeffs() = default;
  FBCoeffs(BasisPtr basis, Eigen::VectorXcd values);
  /// All-zero coefficients.
  explicit FBCoeffs(BasisPtr basis);

  const BasisPtr& basis() const { return basis_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }

  /// a_{k,q} for any sign of k; negative k by conjugation.
  Complex at(int k, int q) const;
  Complex& ref(int k, int q) { return values_(basis_->index(k, q)); }
  std::span<const Complex> block(int k) const;

  /// Squared norm over the full (both-signs) coefficient set.
  double squared_norm() const;

 private:
  BasisPtr basis_;
  Eigen::VectorXcd values_;
};

/// Least-squares fit of the basis to the centred Fourier transform of the
/// image on the Cartesian grid points inside the disk. Throws on size mismatch.
FBCoeffs expand(const Image& image, const BasisPtr& basis);
/// Same fit applied to values already on the centred Fourier grid (for
/// example a CTF). The result is projected onto conjugate-symmetric coefficients.
FBCoeffs expand_fourier(const FourierGrid& grid, const BasisPtr& basis);

/// Coefficient sum on the centred Cartesian Fourier grid, zero outside the disk.
FourierGrid reconstruct_fourier(const FBCoeffs& coeffs);
/// Real-space image: inverse transform of reconstruct_fourier, real part.
Image reconstruct(const FBCoeffs& coeffs);
/// Largest |imag| / largest |real| of the inverse transform before the
/// imaginary residue is discarded.
double reconstruct_imaginary_residue(const FBCoeffs& coeffs);

/// a'_{k,q} = a_{k,q} e^{-i k alpha}: the coefficients of the image rotated
/// counter-clockwise by alpha.
FBCoeffs rotate_coeffs(const FBCoeffs& coeffs, double alpha);

struct RidResult {
  double distance = 0;  // rotationally invariant distance
  double angle = 0;     // counter-clockwise rotation of image j that best matches image i, in (-pi, pi]
};

/// min over the fft_size-point rotation grid of ||a_i - rotate_coeffs(a_j, alpha)||,
/// evaluated with one inverse FFT of the angular cross-correlation.
/// Symmetric: rid_align(a, b) and rid_align(b, a) return the same distance and
/// opposite angles.
RidResult rid_align(const FBCoeffs& coeffs_i, const FBCoeffs& coeffs_j, int fft_size);

/// E|a_{k,q}|^2 of expand() under unit-variance white pixel noise, per stored index.
Eigen::VectorXd coefficient_noise_variance(const BasisTables& basis);

/// Per-k matrices of a radially symmetric Fourier multiplier f(|xi|):
/// M_k(q, q') = 2 pi sum_j w_j f(r_j) R_{k,q}(r_j) R_{k,q'}(r_j) on the radial quadrature.
std::vector<Eigen::MatrixXd> radial_filter_blocks(const BasisTables& basis,
                                                  const std::function<double(double)>& f);
/// a'_k = M_k a_k for every k >= 0.
FBCoeffs apply_radial_filter(const FBCoeffs& coeffs, const std::vector<Eigen::MatrixXd>& blocks);

/// Gram matrix of the k >= 0 basis functions under the tables' quadrature.
Eigen::MatrixXcd quadrature_gram(const BasisTables& basis);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int count, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace mfvdm
