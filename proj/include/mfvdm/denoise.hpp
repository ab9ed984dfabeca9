#pragma once

#include "mfvdm/common.hpp"
#include "mfvdm/initial_graph.hpp"
#include "mfvdm/mfvdm_core.hpp"
#include "mfvdm/steerable_basis.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace mfvdm {

enum class FilterKind { kMfvdm1 = 1, kMfvdm2, kMfvdm3, kMfvdm4, kMfvdm5 };

/// h(lambda): lambda for kinds 1 and 4, 2 lambda - lambda^2 for 2 and 5,
/// lambda^3 - 3 lambda^2 + 3 lambda for 3. Kinds 1-3 keep the top m
/// eigenpairs, kinds 4-5 the full spectrum.
struct FilterSpec {
  FilterKind kind = FilterKind::kMfvdm2;
  int m = 50;

  bool truncated() const { return kind == FilterKind::kMfvdm1 || kind == FilterKind::kMfvdm2 || kind == FilterKind::kMfvdm3; }
};

double filter_response(FilterKind kind, double lambda);
std::string to_string(FilterKind kind);
/// Accepts "mfvdm1".."mfvdm5" (any case) or "1".."5".
FilterKind parse_filter_kind(const std::string& text);

/// n x p_k matrix of the frequency-k coefficients, one row per image.
using CoeffMatrix = Eigen::MatrixXcd;

CoeffMatrix coefficient_block(const std::vector<FBCoeffs>& coeffs, int k);
void set_coefficient_block(std::vector<FBCoeffs>& coeffs, int k, const CoeffMatrix& block);

/// D^{-1/2} U h(Lambda) U* D^{1/2} A. Truncating kinds use the first m pairs
/// of the spectrum; full kinds require the complete spectrum.
CoeffMatrix apply_spectral_filter(const CoeffMatrix& a, const Spectrum& spectrum, const Eigen::VectorXd& degree,
                                  const FilterSpec& filter);

/// Same with the spectrum of frequency k taken from a bundle. Throws
/// Error(kInvalidArgument) when k exceeds the bundle's frequencies.
CoeffMatrix apply_spectral_filter(const CoeffMatrix& a, const SpectralBundle& bundle, int k, const FilterSpec& filter);

struct DenoiseResult {
  std::vector<FBCoeffs> images;
  std::vector<FBCoeffs> ctfs;  // effective CTFs; empty when no CTF coefficients were given
};

/// Filters every angular block k = 0..k_max of the basis over the graph. Block
/// k uses the connection matrix of frequency -k, which carries coefficients of
/// image j into the frame of image i for a_{k,q} -> a_{k,q} e^{-i k alpha}.
/// ctf_coeffs may be empty.
DenoiseResult denoise_stack(const std::vector<FBCoeffs>& coeffs, const std::vector<FBCoeffs>& ctf_coeffs,
                            const ViewGraph& graph, const FilterSpec& filter, const EigenOptions& eigen = {});

ImageStack reconstruct_denoised(const std::vector<FBCoeffs>& coeffs);

/// Real part of the effective CTF on the centred Fourier grid.
Image effective_ctf_grid(const FBCoeffs& ctf);

struct CtfCorrectionOptions {
  std::optional<double> epsilon;  // unset selects 1e-2 max |C|^2
  bool regularized = true;
};

/// F^{-1}(F(image) C / (C^2 + eps)). The unregularized form divides by C and
/// zeroes grid points where C is exactly zero. Throws Error(kInvalidArgument)
/// for an explicit epsilon <= 0 or mismatched sizes.
Image ctf_correct(const Image& image, const Image& ctf, const CtfCorrectionOptions& options = {});

/// Multiplies the spectrum by sqrt(psd).
Image recolor(const Image& image, const Image& psd);

}  // namespace mfvdm
