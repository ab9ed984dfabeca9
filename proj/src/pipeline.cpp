#include "mfvdm/pipeline.hpp"

#include <map>

namespace mfvdm {

BasisPtr make_basis(const RunConfig& config) { return build_basis(config.size, config.kappa, config.support_radius); }

PreparedStack prepare_stack(const ImageStack& stack, const DatasetManifest& manifest, const RunConfig& config) {
  if (static_cast<int>(stack.size()) != manifest.count())
    throw Error(ErrorCode::kDimensionMismatch, "prepare_stack: manifest has " + std::to_string(manifest.count()) +
                                                   " images, stack has " + std::to_string(stack.size()));
  PreparedStack out;
  out.basis = make_basis(config);
  const PreprocessOptions options = preprocess_options(config);
  out.pre = preprocess(stack, options.phase_flip ? ctf_grids(manifest) : std::vector<Image>{}, options);
  out.coeffs.resize(stack.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < stack.size(); ++i) out.coeffs[i] = expand(out.pre.images[i], out.basis);
  return out;
}

Classification classify(const PreparedStack& prepared, const RunConfig& config) {
  Classification out;
  out.initial = initial_nn_search(prepared.coeffs, search_options(config));
  out.refined = refine_graph(out.initial.graph, config.neighbors, spectral_options(config), config.fft_size);
  return out;
}

std::vector<FBCoeffs> ctf_coefficients(const DatasetManifest& manifest, const BasisPtr& basis, bool absolute) {
  std::map<int, FBCoeffs> per_group;
  std::vector<FBCoeffs> out;
  out.reserve(manifest.group_of.size());
  for (int g : manifest.group_of) {
    auto it = per_group.find(g);
    if (it == per_group.end()) {
      const Image grid = ctf_grid(manifest.groups.at(static_cast<std::size_t>(g)), manifest.size);
      const Image values = absolute ? Image(grid.cwiseAbs()) : grid;
      it = per_group.emplace(g, expand_fourier(values.cast<Complex>(), basis)).first;
    }
    out.push_back(it->second);
  }
  return out;
}

CorrectedStack finish_denoising(const DenoiseResult& denoised, const PreprocessResult& pre,
                                const CtfCorrectionOptions& correction, bool recolor_images) {
  const std::size_t n = denoised.images.size();
  if (pre.scales.size() != n || (!denoised.ctfs.empty() && denoised.ctfs.size() != n))
    throw Error(ErrorCode::kDimensionMismatch, "finish_denoising: inputs differ in length");
  CorrectedStack out;
  out.images.resize(n);
  if (!denoised.ctfs.empty()) out.effective_ctfs.resize(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    Image im = reconstruct(denoised.images[i]);
    if (recolor_images && pre.noise_psd) im = recolor(im, *pre.noise_psd);
    if (!denoised.ctfs.empty()) {
      out.effective_ctfs[i] = effective_ctf_grid(denoised.ctfs[i]);
      im = ctf_correct(im, out.effective_ctfs[i], correction);
    }
    out.images[i] = (im.array() * pre.scales[i] + pre.offsets[i]).matrix();
  }
  return out;
}

CorrectedStack denoise_prepared(const PreparedStack& prepared, const DatasetManifest& manifest, const ViewGraph& graph,
                                const RunConfig& config) {
  const std::vector<FBCoeffs> ctfs =
      config.ctf_correction ? ctf_coefficients(manifest, prepared.basis, config.phase_flip) : std::vector<FBCoeffs>{};
  EigenOptions eigen;
  eigen.seed = config.seed;
  const DenoiseResult d = denoise_stack(prepared.coeffs, ctfs, graph.symmetrized(), filter_spec(config), eigen);
  return finish_denoising(d, prepared.pre, correction_options(config), config.recolor);
}

}  // namespace mfvdm
