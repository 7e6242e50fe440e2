#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tactx/contact.hpp"
#include "tactx/errors.hpp"
#include "tactx/pipeline.hpp"

// key=value configuration files: one assignment per line, '#' starts a
// comment, blank lines are ignored, keys may not repeat. Readers consume a
// fixed schema and reject files with keys they do not know.
namespace tactx::io {

namespace detail {

inline std::string trim(const std::string& s) {
  const std::size_t lo = s.find_first_not_of(" \t\r");
  if (lo == std::string::npos) return "";
  const std::size_t hi = s.find_last_not_of(" \t\r");
  return s.substr(lo, hi - lo + 1);
}

}  // namespace detail

inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" +
                        stripped + "'");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream text;
  text << is.rdbuf();
  try {
    return parse_config_text(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// Typed accessor over a parsed key/value map. Every key a schema reads is
// marked used; finish() rejects whatever remains.
class ConfigReader {
 public:
  explicit ConfigReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  double get_double(const std::string& key, double fallback) {
    const std::string* raw = take(key);
    if (!raw) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(*raw, &used);
      if (used != raw->size()) throw std::invalid_argument(*raw);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + *raw + "' is not a number");
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
    const std::string* raw = take(key);
    if (!raw) return fallback;
    try {
      if (!raw->empty() && (*raw)[0] == '-') throw std::invalid_argument(*raw);
      std::size_t used = 0;
      const unsigned long long v = std::stoull(*raw, &used);
      if (used != raw->size()) throw std::invalid_argument(*raw);
      return std::uint64_t(v);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + *raw + "' is not a non-negative integer");
    }
  }

  std::size_t get_size(const std::string& key, std::size_t fallback) {
    return std::size_t(get_u64(key, std::uint64_t(fallback)));
  }

  // Comma-separated positive integers, e.g. "512,128".
  std::vector<std::size_t> get_size_list(const std::string& key,
                                         std::vector<std::size_t> fallback) {
    const std::string* raw = take(key);
    if (!raw) return fallback;
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = raw->find(',', pos);
      const std::string cell =
          detail::trim(raw->substr(pos, comma == std::string::npos ? comma : comma - pos));
      try {
        if (cell.empty() || cell[0] == '-') throw std::invalid_argument(cell);
        std::size_t used = 0;
        const unsigned long long v = std::stoull(cell, &used);
        if (used != cell.size() || v == 0) throw std::invalid_argument(cell);
        out.push_back(std::size_t(v));
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + cell + "' is not a positive integer");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  bool contains(const std::string& key) const { return kv_.count(key) != 0; }

  void finish() const {
    std::string unknown;
    for (const auto& [key, value] : kv_) {
      if (!used_.count(key)) unknown += unknown.empty() ? key : ", " + key;
    }
    if (!unknown.empty()) throw ConfigError("unknown keys: " + unknown);
  }

 private:
  const std::string* take(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

// Training schema. Every key is optional and falls back to the tuned
// defaults; the latent and hidden keys resize the networks while the
// projection endpoints stay pinned to the autoencoder latents.
//
//   seed          master seed; per-network seeds derive from it
//   epochs_svb, epochs_mvb, epochs_mvd, epochs_s2mpn, epochs_m2mpn
//   learning_rate, batch_size, beta, lr_floor   (set all five networks)
//   latent_svb, latent_mvb, latent_mvd
//   hidden_svb, hidden_mvb, hidden_mvd, hidden_s2mpn, hidden_m2mpn
inline pipeline::PipelineConfig pipeline_config_from(ConfigReader& r) {
  const std::uint64_t seed = r.get_u64("seed", 0);
  pipeline::PipelineConfig c = pipeline::default_pipeline_config(seed);

  c.svb_hyper.epochs = r.get_size("epochs_svb", c.svb_hyper.epochs);
  c.mvb_hyper.epochs = r.get_size("epochs_mvb", c.mvb_hyper.epochs);
  c.mvd_hyper.epochs = r.get_size("epochs_mvd", c.mvd_hyper.epochs);
  c.s2mpn_hyper.epochs = r.get_size("epochs_s2mpn", c.s2mpn_hyper.epochs);
  c.m2mpn_hyper.epochs = r.get_size("epochs_m2mpn", c.m2mpn_hyper.epochs);

  // Shared optimizer keys overwrite every network's value, but only when the
  // file actually provides them; the per-network tuned defaults differ.
  const auto hypers = {&c.svb_hyper, &c.mvb_hyper, &c.mvd_hyper, &c.s2mpn_hyper,
                       &c.m2mpn_hyper};
  if (r.contains("learning_rate")) {
    const double lr = r.get_double("learning_rate", 0.0);
    for (nn::TrainHyper* h : hypers) h->learning_rate = lr;
  }
  if (r.contains("batch_size")) {
    const std::size_t batch = r.get_size("batch_size", 0);
    for (nn::TrainHyper* h : hypers) h->batch_size = batch;
  }
  if (r.contains("beta")) {
    const double beta = r.get_double("beta", 0.0);
    for (nn::TrainHyper* h : hypers) h->beta = beta;
  }
  if (r.contains("lr_floor")) {
    const double floor = r.get_double("lr_floor", 0.0);
    for (nn::TrainHyper* h : hypers) h->lr_floor = floor;
  }

  const std::size_t latent_svb = r.get_size("latent_svb", c.svb_arch.latent_dim);
  const std::size_t latent_mvb = r.get_size("latent_mvb", c.mvb_arch.latent_dim);
  const std::size_t latent_mvd = r.get_size("latent_mvd", c.mvd_arch.latent_dim);

  const auto hidden = [&r](const std::string& key, const nn::VaeArch& arch) {
    return r.get_size_list(key, {arch.encoder_dims.begin() + 1, arch.encoder_dims.end()});
  };
  const std::vector<std::size_t> h_svb = hidden("hidden_svb", c.svb_arch);
  const std::vector<std::size_t> h_mvb = hidden("hidden_mvb", c.mvb_arch);
  const std::vector<std::size_t> h_mvd = hidden("hidden_mvd", c.mvd_arch);
  const std::vector<std::size_t> h_s2 = r.get_size_list(
      "hidden_s2mpn", {c.s2mpn_arch.dims.begin() + 1, c.s2mpn_arch.dims.end() - 1});
  const std::vector<std::size_t> h_m2 = r.get_size_list(
      "hidden_m2mpn", {c.m2mpn_arch.dims.begin() + 1, c.m2mpn_arch.dims.end() - 1});

  const auto encoder = [](std::size_t input, const std::vector<std::size_t>& hid) {
    std::vector<std::size_t> dims{input};
    dims.insert(dims.end(), hid.begin(), hid.end());
    return dims;
  };
  const auto bridge = [](std::size_t from, const std::vector<std::size_t>& hid, std::size_t to) {
    std::vector<std::size_t> dims{from};
    dims.insert(dims.end(), hid.begin(), hid.end());
    dims.push_back(to);
    return dims;
  };
  c.svb_arch = {encoder(kElectrodeCount, h_svb), latent_svb};
  c.mvb_arch = {encoder(kFieldGrid * kFieldGrid, h_mvb), latent_mvb};
  c.mvd_arch = {encoder(kFieldGrid * kFieldGrid, h_mvd), latent_mvd};
  c.s2mpn_arch = {bridge(latent_svb, h_s2, latent_mvb)};
  c.m2mpn_arch = {bridge(latent_mvb, h_m2, latent_mvd)};

  r.finish();
  try {
    pipeline::validate(c);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid training configuration: ") + e.what());
  }
  return c;
}

inline pipeline::PipelineConfig read_pipeline_config(const std::filesystem::path& path) {
  ConfigReader r(read_config_file(path));
  try {
    return pipeline_config_from(r);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// Sampling-range schema for dataset generation; keys <name>_min/<name>_max
// for u, v, force, radius, angle, all optional.
inline SampleRanges ranges_from(ConfigReader& r) {
  SampleRanges s;
  s.u_min = r.get_double("u_min", s.u_min);
  s.u_max = r.get_double("u_max", s.u_max);
  s.v_min = r.get_double("v_min", s.v_min);
  s.v_max = r.get_double("v_max", s.v_max);
  s.force_min = r.get_double("force_min", s.force_min);
  s.force_max = r.get_double("force_max", s.force_max);
  s.radius_min = r.get_double("radius_min", s.radius_min);
  s.radius_max = r.get_double("radius_max", s.radius_max);
  s.angle_min = r.get_double("angle_min", s.angle_min);
  s.angle_max = r.get_double("angle_max", s.angle_max);
  r.finish();
  try {
    tactx::validate(s);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid sampling ranges: ") + e.what());
  }
  return s;
}

inline SampleRanges read_ranges(const std::filesystem::path& path) {
  ConfigReader r(read_config_file(path));
  try {
    return ranges_from(r);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace tactx::io
