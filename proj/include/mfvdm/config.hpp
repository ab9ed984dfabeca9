#pragma once

#include "mfvdm/common.hpp"
#include "mfvdm/denoise.hpp"
#include "mfvdm/initial_graph.hpp"
#include "mfvdm/mfvdm_core.hpp"
#include "mfvdm/simulation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mfvdm {

/// Every tunable of a pipeline run. JSON keys equal the field names.
struct RunConfig {
  // simulation
  int size = 33;
  int count = 1000;
  std::uint64_t seed = 1;
  std::vector<double> snr = {0.05, 0.02, 0.01};
  int n_blobs = 12;
  int ctf_groups = 20;
  double defocus_min_um = 1.0;
  double defocus_max_um = 4.0;
  double wavelength_a = 0.025;
  double cs_mm = 2.0;
  double pixel_size_a = 2.82 * 129.0 / 33.0;
  double amplitude_contrast = 0.07;
  double max_shift = 0.0;
  std::string noise = "white";  // "white" or "colored"
  double noise_corner_frequency = 0.1;

  // basis
  double kappa = 0.5;
  double support_radius = 14.0;

  // preprocessing
  bool standardize = true;
  bool whiten = false;
  bool phase_flip = true;

  // graphs
  int neighbors = 50;
  double energy_fraction = 0.9;
  double noise_variance = 1.0;
  int k_tilde = 10;
  int m = 50;
  int t = 1;
  int fft_size = 1024;

  // denoising
  std::string filter = "mfvdm2";
  bool ctf_correction = true;     // off: filter images only
  std::optional<double> epsilon;  // unset: 1e-2 max |C|^2 per image
  bool recolor = true;            // only acts when whitening was applied

  std::string output_dir = ".";
};

/// Throws Error(kConfig) naming the first violated precondition.
void validate(const RunConfig& config);

/// Parses JSON text. Unknown keys and ill-typed values throw Error(kConfig);
/// missing keys keep their defaults. The result is validated.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string to_json(const RunConfig& config, int indent = 2);

SimulationConfig simulation_config(const RunConfig& config);
PreprocessOptions preprocess_options(const RunConfig& config);
NeighborSearchOptions search_options(const RunConfig& config);
SpectralOptions spectral_options(const RunConfig& config);
FilterSpec filter_spec(const RunConfig& config);
CtfCorrectionOptions correction_options(const RunConfig& config);

}  // namespace mfvdm
