#include "cli.hpp"

#include "mfvdm/io.hpp"
#include "mfvdm/metrics.hpp"
#include "mfvdm/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace mfvdm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool g_verbose = false;

void log(const std::string& message) {
  if (g_verbose) std::cerr << "[mfvdm] " << message << std::endl;
}

class StageTimer {
 public:
  explicit StageTimer(std::string name) : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {
    log(name_ + " ...");
  }
  ~StageTimer() {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    log(name_ + " done in " + buf);
  }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

json scores_json(const ImageScores& s) {
  return {{"mse", s.mse}, {"psnr", std::isfinite(s.psnr) ? json(s.psnr) : json(nullptr)}, {"ssim", s.ssim}};
}

struct Simulated {
  CleanDataset clean;
  std::vector<ImageStack> noisy;
};

Simulated simulate(const RunConfig& config) {
  Simulated out;
  {
    StageTimer t("simulate clean projections");
    out.clean = simulate_clean(simulation_config(config));
  }
  const NoiseModel noise = simulation_config(config).noise;
  for (double snr : config.snr) {
    StageTimer t("add noise at SNR " + snr_tag(snr));
    out.noisy.push_back(add_noise(out.clean.ctf_clean, snr, config.seed, noise));
  }
  return out;
}

void write_simulated(const RunConfig& config, const Simulated& sim, const std::string& out_dir) {
  ensure_directory(out_dir);
  write_stack(join(out_dir, "clean.mfvs"), sim.clean.reference);
  write_stack(join(out_dir, "ctf_clean.mfvs"), sim.clean.ctf_clean);
  for (std::size_t s = 0; s < config.snr.size(); ++s)
    write_stack(join(out_dir, "noisy_snr" + snr_tag(config.snr[s]) + ".mfvs"), sim.noisy[s]);
  write_manifest(join(out_dir, "manifest.csv"), sim.clean.manifest);
  write_text(join(out_dir, "config.json"), to_json(config) + "\n");
}

void check_count(const ImageStack& stack, const DatasetManifest& manifest, const std::string& what) {
  if (static_cast<int>(stack.size()) != manifest.count())
    throw Error(ErrorCode::kDimensionMismatch, what + " holds " + std::to_string(stack.size()) +
                                                   " images but the manifest lists " +
                                                   std::to_string(manifest.count()));
}

void check_geometry(const RunConfig& config, const ImageStack& stack) {
  if (!stack.empty() && stack.front().rows() != config.size)
    throw Error(ErrorCode::kConfig, "config: size " + std::to_string(config.size) + " differs from the stack's " +
                                        std::to_string(stack.front().rows()));
}

Classification classify_stack(const RunConfig& config, const PreparedStack& prepared, const DatasetManifest& manifest,
                              const std::string& out_dir) {
  Classification c;
  {
    StageTimer t("initial nearest-neighbor search");
    c.initial = initial_nn_search(prepared.coeffs, search_options(config));
  }
  {
    StageTimer t("MFVDM refinement");
    c.refined = refine_graph(c.initial.graph, config.neighbors, spectral_options(config), config.fft_size);
  }
  ensure_directory(out_dir);
  write_graph(join(out_dir, "initial_graph.csv"), c.initial.directed);
  write_graph(join(out_dir, "refined_graph.csv"), c.refined.directed);
  json summary = {{"count", manifest.count()},
                  {"neighbors", config.neighbors},
                  {"initial_edges", c.initial.directed.edge_count()},
                  {"refined_edges", c.refined.directed.edge_count()},
                  {"config", json::parse(to_json(config))}};
  if (manifest.count() == static_cast<int>(prepared.coeffs.size())) {
    summary["initial_fraction_theta_below_20"] = true_neighbor_fraction(c.initial.directed, manifest.rotations, 20.0);
    summary["refined_fraction_theta_below_20"] = true_neighbor_fraction(c.refined.directed, manifest.rotations, 20.0);
  }
  write_text(join(out_dir, "classify_summary.json"), summary.dump(2) + "\n");
  return c;
}

CorrectedStack denoise_stack_files(const RunConfig& config, const PreparedStack& prepared,
                                   const DatasetManifest& manifest, const ViewGraph& graph,
                                   const std::string& out_dir) {
  CorrectedStack d;
  {
    StageTimer t("denoise with " + config.filter);
    d = denoise_prepared(prepared, manifest, graph, config);
  }
  for (const Image& im : d.images)
    if (!im.allFinite()) throw Error(ErrorCode::kNonConvergence, "denoise: non-finite output pixel");
  ensure_directory(out_dir);
  write_stack(join(out_dir, "denoised.mfvs"), d.images);
  if (!d.effective_ctfs.empty()) write_stack(join(out_dir, "effective_ctf.mfvs"), d.effective_ctfs);
  return d;
}

void evaluate_files(const RunConfig& config, const ImageStack& images, const ImageStack& reference,
                    const DatasetManifest* manifest, const ViewGraph* graph, const std::string& out_dir) {
  if (images.size() != reference.size())
    throw Error(ErrorCode::kDimensionMismatch, "evaluate: image and reference counts differ");
  EvalReport report;
  {
    StageTimer t("evaluate");
    report = evaluate_stack(images, reference);
  }
  ensure_directory(out_dir);
  write_scores(join(out_dir, "scores.csv"), report);
  json summary = {{"count", report.rows.size()}, {"mean", scores_json(report.mean)},
                  {"config", json::parse(to_json(config))}};
  if (manifest && graph) {
    const NeighborHistograms h = neighbor_histograms(*graph, *manifest);
    write_histogram(join(out_dir, "theta_hist.csv"), h.theta);
    write_histogram(join(out_dir, "alignment_error_hist.csv"), h.alignment_error);
    summary["edges"] = h.theta.total();
  }
  write_text(join(out_dir, "summary.json"), summary.dump(2) + "\n");
}

void set_threads(std::optional<int> flag) {
  int threads = 0;
  if (flag) {
    threads = *flag;
  } else if (const char* env = std::getenv("MFVDM_THREADS")) {
    try {
      threads = std::stoi(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, std::string("MFVDM_THREADS is not an integer: ") + env);
    }
  }
  if (threads < 0) throw Error(ErrorCode::kConfig, "thread count must be positive");
  if (threads > 0) omp_set_num_threads(threads);
}

void report_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << std::endl;
}

}  // namespace

std::string snr_tag(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", snr);
  return buf;
}

void cmd_simulate(const RunConfig& config, const std::string& out_dir) {
  write_simulated(config, simulate(config), out_dir);
}

void cmd_classify(const RunConfig& config, const std::string& stack_path, const std::string& manifest_path,
                  const std::string& out_dir) {
  const ImageStack stack = read_stack(stack_path);
  const DatasetManifest manifest = read_manifest(manifest_path);
  check_count(stack, manifest, stack_path);
  check_geometry(config, stack);
  classify_stack(config, prepare_stack(stack, manifest, config), manifest, out_dir);
}

void cmd_denoise(const RunConfig& config, const std::string& stack_path, const std::string& manifest_path,
                 const std::string& graph_path, const std::string& out_dir) {
  const ImageStack stack = read_stack(stack_path);
  const DatasetManifest manifest = read_manifest(manifest_path);
  check_count(stack, manifest, stack_path);
  check_geometry(config, stack);
  const ViewGraph graph = read_graph(graph_path, manifest.count());
  denoise_stack_files(config, prepare_stack(stack, manifest, config), manifest, graph, out_dir);
}

void cmd_evaluate(const RunConfig& config, const std::string& images_path, const std::string& reference_path,
                  const std::optional<std::string>& manifest_path, const std::optional<std::string>& graph_path,
                  const std::string& out_dir) {
  const ImageStack images = read_stack(images_path);
  const ImageStack reference = read_stack(reference_path);
  if (manifest_path.has_value() != graph_path.has_value())
    throw Error(ErrorCode::kInvalidArgument, "evaluate: --manifest and --graph must be given together");
  if (manifest_path) {
    const DatasetManifest manifest = read_manifest(*manifest_path);
    const ViewGraph graph = read_graph(*graph_path, manifest.count());
    evaluate_files(config, images, reference, &manifest, &graph, out_dir);
  } else {
    evaluate_files(config, images, reference, nullptr, nullptr, out_dir);
  }
}

void cmd_run(const RunConfig& config, const std::string& out_dir, bool resume) {
  const std::string manifest_path = join(out_dir, "manifest.csv");
  const std::string clean_path = join(out_dir, "clean.mfvs");
  auto noisy_path = [&](double snr) { return join(out_dir, "noisy_snr" + snr_tag(snr) + ".mfvs"); };

  bool have_simulation = resume && fs::exists(manifest_path) && fs::exists(clean_path);
  for (double snr : config.snr) have_simulation = have_simulation && fs::exists(noisy_path(snr));
  if (have_simulation) {
    log("resume: reusing simulated stacks");
  } else {
    cmd_simulate(config, out_dir);
  }
  const DatasetManifest manifest = read_manifest(manifest_path);
  const ImageStack reference = read_stack(clean_path);

  for (double snr : config.snr) {
    const std::string dir = join(out_dir, "snr" + snr_tag(snr));
    const ImageStack noisy = read_stack(noisy_path(snr));
    check_geometry(config, noisy);
    const PreparedStack prepared = prepare_stack(noisy, manifest, config);

    ViewGraph refined;
    const std::string graph_path = join(dir, "refined_graph.csv");
    if (resume && fs::exists(graph_path)) {
      log("resume: reusing " + graph_path);
      refined = read_graph(graph_path, manifest.count());
    } else {
      refined = classify_stack(config, prepared, manifest, dir).refined.directed;
    }

    ImageStack denoised;
    const std::string denoised_path = join(dir, "denoised.mfvs");
    if (resume && fs::exists(denoised_path)) {
      log("resume: reusing " + denoised_path);
      denoised = read_stack(denoised_path);
    } else {
      denoised = denoise_stack_files(config, prepared, manifest, refined, dir).images;
    }
    const ViewGraph sym = refined.symmetrized();
    evaluate_files(config, denoised, reference, &manifest, &sym, dir);
    evaluate_files(config, noisy, reference, nullptr, nullptr, join(dir, "noisy_eval"));
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Multi-frequency vector diffusion maps for cryo-EM image classification and denoising", "mfvdm"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<int> threads;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--threads", threads, "worker thread cap (falls back to MFVDM_THREADS)");
  app.add_flag("--verbose", verbose, "log stage timings to stderr");

  std::string out, stack, manifest, graph, images, reference;
  std::optional<std::string> eval_manifest, eval_graph;
  bool resume = false;

  CLI::App* sim = app.add_subcommand("simulate", "simulate clean and noisy stacks with their manifest");
  sim->add_option("--out", out, "output directory (default: config output_dir)");

  CLI::App* cls = app.add_subcommand("classify", "initial and MFVDM-refined neighbor graphs");
  cls->add_option("--stack", stack, "input stack (.mfvs)")->required()->check(CLI::ExistingFile);
  cls->add_option("--manifest", manifest, "manifest CSV")->required()->check(CLI::ExistingFile);
  cls->add_option("--out", out, "output directory");

  CLI::App* den = app.add_subcommand("denoise", "graph filtering and CTF correction");
  den->add_option("--stack", stack, "input stack (.mfvs)")->required()->check(CLI::ExistingFile);
  den->add_option("--manifest", manifest, "manifest CSV")->required()->check(CLI::ExistingFile);
  den->add_option("--graph", graph, "graph CSV")->required()->check(CLI::ExistingFile);
  den->add_option("--out", out, "output directory");

  CLI::App* ev = app.add_subcommand("evaluate", "MSE, PSNR, SSIM and neighbor histograms");
  ev->add_option("--images", images, "stack to score (.mfvs)")->required()->check(CLI::ExistingFile);
  ev->add_option("--reference", reference, "clean reference stack (.mfvs)")->required()->check(CLI::ExistingFile);
  ev->add_option("--manifest", eval_manifest, "manifest CSV, for histograms")->check(CLI::ExistingFile);
  ev->add_option("--graph", eval_graph, "graph CSV, for histograms")->check(CLI::ExistingFile);
  ev->add_option("--out", out, "output directory");

  CLI::App* run = app.add_subcommand("run", "every stage for every configured SNR");
  run->add_option("--out", out, "output directory");
  run->add_flag("--resume", resume, "reuse stage outputs that already exist");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    g_verbose = verbose;
    set_threads(threads);
    const RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    validate(config);
    if (out.empty()) out = config.output_dir;
    if (sim->parsed()) cmd_simulate(config, out);
    if (cls->parsed()) cmd_classify(config, stack, manifest, out);
    if (den->parsed()) cmd_denoise(config, stack, manifest, graph, out);
    if (ev->parsed()) cmd_evaluate(config, images, reference, eval_manifest, eval_graph, out);
    if (run->parsed()) cmd_run(config, out, resume);
  } catch (const Error& e) {
    report_error(to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace mfvdm::cli
