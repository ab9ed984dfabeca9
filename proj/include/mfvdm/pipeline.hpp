#pragma once

#include "mfvdm/config.hpp"
#include "mfvdm/denoise.hpp"
#include "mfvdm/initial_graph.hpp"
#include "mfvdm/mfvdm_core.hpp"
#include "mfvdm/simulation.hpp"
#include "mfvdm/steerable_basis.hpp"

#include <vector>

namespace mfvdm {

BasisPtr make_basis(const RunConfig& config);

/// Preprocessed images and their expansion coefficients.
struct PreparedStack {
  BasisPtr basis;
  PreprocessResult pre;
  std::vector<FBCoeffs> coeffs;
};

/// Preprocess per config (CTFs from the manifest) and expand every image.
PreparedStack prepare_stack(const ImageStack& stack, const DatasetManifest& manifest, const RunConfig& config);

struct Classification {
  NeighborSearchResult initial;
  RefinedGraph refined;
};

/// Initial rotationally invariant search followed by MFVDM refinement, both
/// with config.neighbors per node.
Classification classify(const PreparedStack& prepared, const RunConfig& config);

/// Expansion of each image's CTF grid, one expansion per defocus group: |C|
/// when phase flipping is on, C otherwise.
std::vector<FBCoeffs> ctf_coefficients(const DatasetManifest& manifest, const BasisPtr& basis, bool absolute);

struct CorrectedStack {
  ImageStack images;          // in the units of the raw input stack
  ImageStack effective_ctfs;  // centred Fourier grids
};

/// Reconstructs, recolors when a whitening PSD is present and `recolor` is
/// set, corrects the CTF and undoes the standardization.
CorrectedStack finish_denoising(const DenoiseResult& denoised, const PreprocessResult& pre,
                                const CtfCorrectionOptions& correction, bool recolor);

/// Graph filtering per config followed by finish_denoising. The graph is
/// symmetrized first. Without config.ctf_correction the CTF coefficients are
/// neither filtered nor used.
CorrectedStack denoise_prepared(const PreparedStack& prepared, const DatasetManifest& manifest, const ViewGraph& graph,
                                const RunConfig& config);

}  // namespace mfvdm
