#include "mfvdm/denoise.hpp"

#include "mfvdm/simulation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mfvdm {

double filter_response(FilterKind kind, double lambda) {
  switch (kind) {
    case FilterKind::kMfvdm1:
    case FilterKind::kMfvdm4: return lambda;
    case FilterKind::kMfvdm2:
    case FilterKind::kMfvdm5: return 2 * lambda - lambda * lambda;
    case FilterKind::kMfvdm3: return lambda * lambda * lambda - 3 * lambda * lambda + 3 * lambda;
  }
  throw Error(ErrorCode::kInvalidArgument, "filter_response: unknown filter kind");
}

std::string to_string(FilterKind kind) { return "mfvdm" + std::to_string(static_cast<int>(kind)); }

FilterKind parse_filter_kind(const std::string& text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t.rfind("mfvdm", 0) == 0) t = t.substr(5);
  if (t.size() == 1 && t[0] >= '1' && t[0] <= '5') return static_cast<FilterKind>(t[0] - '0');
  throw Error(ErrorCode::kInvalidArgument, "unknown filter kind '" + text + "' (expected mfvdm1..mfvdm5)");
}

CoeffMatrix coefficient_block(const std::vector<FBCoeffs>& coeffs, int k) {
  if (coeffs.empty()) throw Error(ErrorCode::kInvalidArgument, "coefficient_block: empty stack");
  const BasisTables& b = *coeffs.front().basis();
  if (k < 0 || k > b.k_max()) throw Error(ErrorCode::kInvalidArgument, "coefficient_block: frequency out of range");
  const int p = b.radial_count(k);
  CoeffMatrix out(static_cast<Eigen::Index>(coeffs.size()), p);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = coeffs[i].values().segment(b.offset(k), p).transpose();
  return out;
}

void set_coefficient_block(std::vector<FBCoeffs>& coeffs, int k, const CoeffMatrix& block) {
  if (coeffs.empty()) throw Error(ErrorCode::kInvalidArgument, "set_coefficient_block: empty stack");
  const BasisTables& b = *coeffs.front().basis();
  const int p = b.radial_count(k);
  if (block.rows() != static_cast<Eigen::Index>(coeffs.size()) || block.cols() != p)
    throw Error(ErrorCode::kDimensionMismatch, "set_coefficient_block: block shape differs from n x p_k");
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    auto seg = coeffs[i].values().segment(b.offset(k), p);
    seg = block.row(static_cast<Eigen::Index>(i)).transpose();
    if (k == 0) seg = seg.real().cast<Complex>();
  }
}

CoeffMatrix apply_spectral_filter(const CoeffMatrix& a, const Spectrum& spectrum, const Eigen::VectorXd& degree,
                                  const FilterSpec& filter) {
  const Eigen::Index n = degree.size();
  if (a.rows() != n || spectrum.vectors.rows() != n)
    throw Error(ErrorCode::kDimensionMismatch, "apply_spectral_filter: coefficient rows differ from graph size");
  Eigen::Index used = spectrum.values.size();
  if (filter.truncated()) {
    if (filter.m < 1 || filter.m > used)
      throw Error(ErrorCode::kInvalidArgument, "apply_spectral_filter: m exceeds the available eigenpairs");
    used = filter.m;
  } else if (used != n) {
    throw Error(ErrorCode::kInvalidArgument, "apply_spectral_filter: full-spectrum filter needs all n eigenpairs");
  }
  Eigen::VectorXd h(used);
  for (Eigen::Index l = 0; l < used; ++l) h(l) = filter_response(filter.kind, spectrum.values(l));
  const auto u = spectrum.vectors.leftCols(used);
  const Eigen::VectorXd sqrt_d = degree.cwiseSqrt();
  const CoeffMatrix projected = h.asDiagonal() * (u.adjoint() * (sqrt_d.asDiagonal() * a));
  return sqrt_d.cwiseInverse().asDiagonal() * (u * projected);
}

CoeffMatrix apply_spectral_filter(const CoeffMatrix& a, const SpectralBundle& bundle, int k, const FilterSpec& filter) {
  if (k < 0 || k > bundle.k_tilde())
    throw Error(ErrorCode::kInvalidArgument,
                "apply_spectral_filter: frequency " + std::to_string(k) + " exceeds the bundle's maximum " +
                    std::to_string(bundle.k_tilde()) + "; compute spectra up to the basis k_max for denoising");
  return apply_spectral_filter(a, bundle.spectrum(k), bundle.degree(), filter);
}

DenoiseResult denoise_stack(const std::vector<FBCoeffs>& coeffs, const std::vector<FBCoeffs>& ctf_coeffs,
                            const ViewGraph& graph, const FilterSpec& filter, const EigenOptions& eigen) {
  if (coeffs.empty()) throw Error(ErrorCode::kInvalidArgument, "denoise_stack: empty stack");
  const int n = static_cast<int>(coeffs.size());
  if (graph.size() != n) throw Error(ErrorCode::kDimensionMismatch, "denoise_stack: graph size differs from stack size");
  if (!ctf_coeffs.empty() && static_cast<int>(ctf_coeffs.size()) != n)
    throw Error(ErrorCode::kDimensionMismatch, "denoise_stack: CTF count differs from stack size");
  for (const FBCoeffs& c : coeffs)
    if (c.basis() != coeffs.front().basis())
      throw Error(ErrorCode::kInvalidArgument, "denoise_stack: coefficients use different bases");
  for (const FBCoeffs& c : ctf_coeffs)
    if (c.basis() != coeffs.front().basis())
      throw Error(ErrorCode::kInvalidArgument, "denoise_stack: CTF coefficients use a different basis");

  DenoiseResult out{coeffs, ctf_coeffs};
  const int k_max = coeffs.front().basis()->k_max();
  const int m = filter.truncated() ? std::min(filter.m, n) : n;
  if (filter.truncated() && filter.m > n)
    throw Error(ErrorCode::kInvalidArgument, "denoise_stack: m exceeds the number of images");
  for (int k = 0; k <= k_max; ++k) {
    const FrequencyMatrix w = build_frequency_matrix(graph, -k);
    const Spectrum spectrum = top_eigs(w, m, eigen);
    set_coefficient_block(out.images, k, apply_spectral_filter(coefficient_block(coeffs, k), spectrum, w.degree, filter));
    if (!ctf_coeffs.empty())
      set_coefficient_block(out.ctfs, k,
                            apply_spectral_filter(coefficient_block(ctf_coeffs, k), spectrum, w.degree, filter));
  }
  return out;
}

ImageStack reconstruct_denoised(const std::vector<FBCoeffs>& coeffs) {
  ImageStack out(coeffs.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = reconstruct(coeffs[i]);
  return out;
}

Image effective_ctf_grid(const FBCoeffs& ctf) { return reconstruct_fourier(ctf).real(); }

Image ctf_correct(const Image& image, const Image& ctf, const CtfCorrectionOptions& options) {
  if (image.rows() != ctf.rows() || image.cols() != ctf.cols())
    throw Error(ErrorCode::kDimensionMismatch, "ctf_correct: image and CTF grid sizes differ");
  Image gain(ctf.rows(), ctf.cols());
  if (options.regularized) {
    double eps = 1e-2 * ctf.cwiseAbs2().maxCoeff();
    if (options.epsilon) {
      if (!(*options.epsilon > 0)) throw Error(ErrorCode::kInvalidArgument, "ctf_correct: epsilon must be positive");
      eps = *options.epsilon;
    }
    if (!(eps > 0)) throw Error(ErrorCode::kInvalidArgument, "ctf_correct: CTF grid is identically zero");
    gain = ctf.array() / (ctf.array().square() + eps);
  } else {
    gain = ctf.unaryExpr([](double c) { return c == 0.0 ? 0.0 : 1.0 / c; });
  }
  return apply_fourier_filter(image, gain);
}

Image recolor(const Image& image, const Image& psd) {
  if ((psd.array() < 0).any()) throw Error(ErrorCode::kInvalidArgument, "recolor: negative power spectrum");
  return apply_fourier_filter(image, psd.cwiseSqrt());
}

}  // namespace mfvdm
