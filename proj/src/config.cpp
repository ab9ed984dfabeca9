#include "mfvdm/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mfvdm {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfig, "config: " + message);
}

template <typename T>
void read(const json& value, const std::string& key, T& out) {
  try {
    out = value.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kConfig, "config: key '" + key + "' has the wrong type");
  }
}

void read_int(const json& value, const std::string& key, int& out) {
  require(value.is_number_integer(), "key '" + key + "' must be an integer");
  read(value, key, out);
}

void read_number(const json& value, const std::string& key, double& out) {
  require(value.is_number(), "key '" + key + "' must be a number");
  read(value, key, out);
}

void read_bool(const json& value, const std::string& key, bool& out) {
  require(value.is_boolean(), "key '" + key + "' must be a boolean");
  out = value.get<bool>();
}

void read_string(const json& value, const std::string& key, std::string& out) {
  require(value.is_string(), "key '" + key + "' must be a string");
  out = value.get<std::string>();
}

using Reader = std::function<void(const json&, RunConfig&)>;

const std::map<std::string, Reader>& readers() {
  static const std::map<std::string, Reader> table = [] {
    std::map<std::string, Reader> r;
    auto integer = [&r](const char* key, int RunConfig::*field) {
      r[key] = [key, field](const json& v, RunConfig& c) { read_int(v, key, c.*field); };
    };
    auto number = [&r](const char* key, double RunConfig::*field) {
      r[key] = [key, field](const json& v, RunConfig& c) { read_number(v, key, c.*field); };
    };
    auto boolean = [&r](const char* key, bool RunConfig::*field) {
      r[key] = [key, field](const json& v, RunConfig& c) { read_bool(v, key, c.*field); };
    };
    auto string = [&r](const char* key, std::string RunConfig::*field) {
      r[key] = [key, field](const json& v, RunConfig& c) { read_string(v, key, c.*field); };
    };
    integer("size", &RunConfig::size);
    integer("count", &RunConfig::count);
    r["seed"] = [](const json& v, RunConfig& c) {
      require(v.is_number_unsigned(), "key 'seed' must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    };
    r["snr"] = [](const json& v, RunConfig& c) {
      require(v.is_array(), "key 'snr' must be an array of numbers");
      c.snr.clear();
      for (const json& x : v) {
        require(x.is_number(), "key 'snr' must be an array of numbers");
        c.snr.push_back(x.get<double>());
      }
    };
    integer("n_blobs", &RunConfig::n_blobs);
    integer("ctf_groups", &RunConfig::ctf_groups);
    number("defocus_min_um", &RunConfig::defocus_min_um);
    number("defocus_max_um", &RunConfig::defocus_max_um);
    number("wavelength_a", &RunConfig::wavelength_a);
    number("cs_mm", &RunConfig::cs_mm);
    number("pixel_size_a", &RunConfig::pixel_size_a);
    number("amplitude_contrast", &RunConfig::amplitude_contrast);
    number("max_shift", &RunConfig::max_shift);
    string("noise", &RunConfig::noise);
    number("noise_corner_frequency", &RunConfig::noise_corner_frequency);
    number("kappa", &RunConfig::kappa);
    number("support_radius", &RunConfig::support_radius);
    boolean("standardize", &RunConfig::standardize);
    boolean("whiten", &RunConfig::whiten);
    boolean("phase_flip", &RunConfig::phase_flip);
    integer("neighbors", &RunConfig::neighbors);
    number("energy_fraction", &RunConfig::energy_fraction);
    number("noise_variance", &RunConfig::noise_variance);
    integer("k_tilde", &RunConfig::k_tilde);
    integer("m", &RunConfig::m);
    integer("t", &RunConfig::t);
    integer("fft_size", &RunConfig::fft_size);
    string("filter", &RunConfig::filter);
    r["epsilon"] = [](const json& v, RunConfig& c) {
      if (v.is_null()) {
        c.epsilon.reset();
        return;
      }
      require(v.is_number(), "key 'epsilon' must be a number or null");
      c.epsilon = v.get<double>();
    };
    boolean("ctf_correction", &RunConfig::ctf_correction);
    boolean("recolor", &RunConfig::recolor);
    string("output_dir", &RunConfig::output_dir);
    return r;
  }();
  return table;
}

}  // namespace

void validate(const RunConfig& c) {
  require(c.size >= 11, "size must be at least 11");
  require(c.count >= 2, "count must be at least 2");
  for (double s : c.snr) require(s > 0 && std::isfinite(s), "every snr must be positive and finite");
  require(c.n_blobs >= 1, "n_blobs must be positive");
  require(c.ctf_groups >= 1, "ctf_groups must be positive");
  require(c.defocus_min_um > 0 && c.defocus_max_um >= c.defocus_min_um,
          "defocus range must be positive and ordered");
  require(c.wavelength_a > 0 && c.cs_mm > 0 && c.pixel_size_a > 0, "CTF physical parameters must be positive");
  require(c.amplitude_contrast >= 0 && c.amplitude_contrast < 1, "amplitude_contrast must lie in [0, 1)");
  require(c.max_shift >= 0, "max_shift must be non-negative");
  require(c.noise == "white" || c.noise == "colored", "noise must be \"white\" or \"colored\"");
  require(c.noise_corner_frequency > 0, "noise_corner_frequency must be positive");
  require(c.kappa > 0 && c.kappa <= 0.5, "kappa must lie in (0, 0.5]");
  require(c.support_radius > 0 && c.support_radius <= image_centre(c.size),
          "support_radius must lie in (0, (size - 1) / 2]");
  require(c.neighbors >= 1 && c.neighbors < c.count, "neighbors must lie in [1, count - 1]");
  require(c.energy_fraction > 0 && c.energy_fraction <= 1, "energy_fraction must lie in (0, 1]");
  require(c.noise_variance >= 0, "noise_variance must be non-negative");
  require(c.k_tilde >= 1, "k_tilde must be positive");
  require(c.m >= 1 && c.m <= c.count, "m must lie in [1, count]");
  require(c.t >= 0, "t must be non-negative");
  require(c.fft_size > c.k_tilde, "fft_size must exceed k_tilde");
  try {
    parse_filter_kind(c.filter);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  if (c.epsilon) require(*c.epsilon > 0, "epsilon must be positive");
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config: invalid JSON: ") + e.what());
  }
  require(doc.is_object(), "top level must be an object");
  RunConfig c;
  for (const auto& [key, value] : doc.items()) {
    const auto it = readers().find(key);
    require(it != readers().end(), "unknown key '" + key + "'");
    it->second(value, c);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_json(const RunConfig& c, int indent) {
  json doc = {
      {"size", c.size},
      {"count", c.count},
      {"seed", c.seed},
      {"snr", c.snr},
      {"n_blobs", c.n_blobs},
      {"ctf_groups", c.ctf_groups},
      {"defocus_min_um", c.defocus_min_um},
      {"defocus_max_um", c.defocus_max_um},
      {"wavelength_a", c.wavelength_a},
      {"cs_mm", c.cs_mm},
      {"pixel_size_a", c.pixel_size_a},
      {"amplitude_contrast", c.amplitude_contrast},
      {"max_shift", c.max_shift},
      {"noise", c.noise},
      {"noise_corner_frequency", c.noise_corner_frequency},
      {"kappa", c.kappa},
      {"support_radius", c.support_radius},
      {"standardize", c.standardize},
      {"whiten", c.whiten},
      {"phase_flip", c.phase_flip},
      {"neighbors", c.neighbors},
      {"energy_fraction", c.energy_fraction},
      {"noise_variance", c.noise_variance},
      {"k_tilde", c.k_tilde},
      {"m", c.m},
      {"t", c.t},
      {"fft_size", c.fft_size},
      {"filter", c.filter},
      {"ctf_correction", c.ctf_correction},
      {"epsilon", c.epsilon ? json(*c.epsilon) : json(nullptr)},
      {"recolor", c.recolor},
      {"output_dir", c.output_dir},
  };
  return doc.dump(indent);
}

SimulationConfig simulation_config(const RunConfig& c) {
  SimulationConfig s;
  s.size = c.size;
  s.count = c.count;
  s.support_radius = c.support_radius;
  s.seed = c.seed;
  s.n_blobs = c.n_blobs;
  s.n_groups = c.ctf_groups;
  s.defocus_min_um = c.defocus_min_um;
  s.defocus_max_um = c.defocus_max_um;
  s.wavelength_a = c.wavelength_a;
  s.cs_mm = c.cs_mm;
  s.pixel_size_a = c.pixel_size_a;
  s.amplitude_contrast = c.amplitude_contrast;
  s.max_shift = c.max_shift;
  s.noise.kind = c.noise == "colored" ? NoiseModel::Kind::kColored : NoiseModel::Kind::kWhite;
  s.noise.corner_frequency = c.noise_corner_frequency;
  return s;
}

PreprocessOptions preprocess_options(const RunConfig& c) {
  PreprocessOptions p;
  p.standardize = c.standardize;
  p.whiten = c.whiten;
  p.phase_flip = c.phase_flip;
  p.corner_radius = c.support_radius;
  return p;
}

NeighborSearchOptions search_options(const RunConfig& c) {
  NeighborSearchOptions o;
  o.neighbors = c.neighbors;
  o.fft_size = c.fft_size;
  o.energy_fraction = c.energy_fraction;
  o.noise_variance = c.noise_variance;
  return o;
}

SpectralOptions spectral_options(const RunConfig& c) {
  SpectralOptions o;
  o.k_tilde = c.k_tilde;
  o.m = c.m;
  o.t = c.t;
  o.eigen.seed = c.seed;
  return o;
}

FilterSpec filter_spec(const RunConfig& c) { return {parse_filter_kind(c.filter), c.m}; }

CtfCorrectionOptions correction_options(const RunConfig& c) {
  CtfCorrectionOptions o;
  o.epsilon = c.epsilon;
  return o;
}

}  // namespace mfvdm
