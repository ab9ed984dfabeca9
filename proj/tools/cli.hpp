#pragma once

#include "mfvdm/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mfvdm::cli {

/// Writes clean.mfvs (projections without CTF), ctf_clean.mfvs, one
/// noisy_snr<value>.mfvs per configured SNR, manifest.csv and config.json.
void cmd_simulate(const RunConfig& config, const std::string& out_dir);

/// Writes initial_graph.csv and refined_graph.csv (config.neighbors rows per
/// image, before symmetrization) and classify_summary.json.
void cmd_classify(const RunConfig& config, const std::string& stack_path, const std::string& manifest_path,
                  const std::string& out_dir);

/// Writes denoised.mfvs and, with CTF correction on, effective_ctf.mfvs.
void cmd_denoise(const RunConfig& config, const std::string& stack_path, const std::string& manifest_path,
                 const std::string& graph_path, const std::string& out_dir);

/// Writes scores.csv and summary.json; with a graph and manifest also
/// theta_hist.csv and alignment_error_hist.csv.
void cmd_evaluate(const RunConfig& config, const std::string& images_path, const std::string& reference_path,
                  const std::optional<std::string>& manifest_path, const std::optional<std::string>& graph_path,
                  const std::string& out_dir);

/// Every stage for every SNR; per-SNR outputs go to snr<value>/. With
/// `resume`, stages whose outputs already exist are loaded instead of rerun.
void cmd_run(const RunConfig& config, const std::string& out_dir, bool resume);

std::string snr_tag(double snr);

/// Parses arguments and dispatches. Errors are reported as one JSON object on
/// stderr; returns the process exit code.
int main(int argc, char** argv);

}  // namespace mfvdm::cli
