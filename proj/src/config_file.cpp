#include "merlion/config_file.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace merlion {

const char* to_string(Metric m) {
  switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::cosine: return "cosine";
    case Metric::l1: return "l1";
  }
  return "unknown";
}

const char* to_string(Transform t) { return t == Transform::l1 ? "l1" : "l2"; }

const char* to_string(SeedPolicy p) { return p == SeedPolicy::gated_count ? "gated_count" : "raw_index"; }

Metric metric_from_string(const std::string& s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "cosine") return Metric::cosine;
  if (s == "l1") return Metric::l1;
  throw std::invalid_argument("unknown metric: " + s);
}

Transform transform_from_string(const std::string& s) {
  if (s == "l1") return Transform::l1;
  if (s == "l2") return Transform::l2;
  throw std::invalid_argument("unknown transform: " + s);
}

SeedPolicy seed_policy_from_string(const std::string& s) {
  if (s == "gated_count") return SeedPolicy::gated_count;
  if (s == "raw_index") return SeedPolicy::raw_index;
  throw std::invalid_argument("unknown seed_policy: " + s);
}

namespace {

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key,
                    double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::size_t used = 0;
  const double v = std::stod(it->second, &used);
  if (used != it->second.size()) throw std::invalid_argument(key + ": not a number: " + it->second);
  return v;
}

std::int64_t parse_int(const std::map<std::string, std::string>& kv, const std::string& key,
                       std::int64_t fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::size_t used = 0;
  const std::int64_t v = std::stoll(it->second, &used);
  if (used != it->second.size()) throw std::invalid_argument(key + ": not an integer: " + it->second);
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_known(const std::map<std::string, std::string>& kv,
                   std::initializer_list<const char*> known) {
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::invalid_argument("unknown config key: " + key);
  }
}

}  // namespace

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": empty key");
    }
    kv[key] = trim(stripped.substr(eq + 1));
  }
  return kv;
}

SamplerConfig sampler_config_from(const std::map<std::string, std::string>& kv) {
  require_known(kv, {"capacity", "tau_ss", "tau_ses", "softmax_scale", "metric", "transform",
                     "seed_policy", "srum_weight", "rep_window_seconds"});
  SamplerConfig c;
  c.capacity = static_cast<int>(parse_int(kv, "capacity", c.capacity));
  c.tau_ss = parse_double(kv, "tau_ss", c.tau_ss);
  c.tau_ses = parse_double(kv, "tau_ses", c.tau_ses);
  c.softmax_scale = parse_double(kv, "softmax_scale", c.softmax_scale);
  if (auto it = kv.find("metric"); it != kv.end()) c.metric = metric_from_string(it->second);
  if (auto it = kv.find("transform"); it != kv.end()) c.transform = transform_from_string(it->second);
  if (auto it = kv.find("seed_policy"); it != kv.end()) {
    c.seed_policy = seed_policy_from_string(it->second);
  }
  c.srum_weight = parse_double(kv, "srum_weight", c.srum_weight);
  c.rep_window_seconds = parse_double(kv, "rep_window_seconds", c.rep_window_seconds);

  if (c.capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  if (c.tau_ss < 0.0 || c.tau_ss > 100.0) throw std::invalid_argument("tau_ss must be in [0,100]");
  if (c.tau_ses < 0.0 || c.tau_ses > 100.0) throw std::invalid_argument("tau_ses must be in [0,100]");
  if (c.softmax_scale <= 0.0) throw std::invalid_argument("softmax_scale must be positive");
  if (c.srum_weight < 0.0 || c.srum_weight > 1.0) {
    throw std::invalid_argument("srum_weight must be in [0,1]");
  }
  if (c.rep_window_seconds < 0.0) throw std::invalid_argument("rep_window_seconds must be >= 0");
  return c;
}

SamplerConfig read_sampler_config(const std::string& path) {
  return sampler_config_from(read_key_values(path));
}

void write_sampler_config(const SamplerConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "capacity = " << config.capacity << "\n"
      << "tau_ss = " << fmt(config.tau_ss) << "\n"
      << "tau_ses = " << fmt(config.tau_ses) << "\n"
      << "softmax_scale = " << fmt(config.softmax_scale) << "\n"
      << "metric = " << to_string(config.metric) << "\n"
      << "transform = " << to_string(config.transform) << "\n"
      << "seed_policy = " << to_string(config.seed_policy) << "\n"
      << "srum_weight = " << fmt(config.srum_weight) << "\n"
      << "rep_window_seconds = " << fmt(config.rep_window_seconds) << "\n";
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

SynthSpec synth_spec_from(const std::map<std::string, std::string>& kv) {
  require_known(kv, {"seed", "dim", "n_frames", "n_relevant", "n_listed", "n_unlisted",
                     "noise_sigma", "murk_level", "theme_weight", "murk_theme_cos",
                     "unlisted_listed_cos", "max_pairwise_cos", "n_humans", "jitter_frames", "fps"});
  SynthSpec s;
  s.seed = static_cast<std::uint64_t>(parse_int(kv, "seed", static_cast<std::int64_t>(s.seed)));
  s.dim = static_cast<int>(parse_int(kv, "dim", s.dim));
  s.n_frames = static_cast<int>(parse_int(kv, "n_frames", s.n_frames));
  s.n_relevant = static_cast<int>(parse_int(kv, "n_relevant", s.n_relevant));
  s.n_listed = static_cast<int>(parse_int(kv, "n_listed", s.n_listed));
  s.n_unlisted = static_cast<int>(parse_int(kv, "n_unlisted", s.n_unlisted));
  s.noise_sigma = parse_double(kv, "noise_sigma", s.noise_sigma);
  s.murk_level = parse_double(kv, "murk_level", s.murk_level);
  s.theme_weight = parse_double(kv, "theme_weight", s.theme_weight);
  s.murk_theme_cos = parse_double(kv, "murk_theme_cos", s.murk_theme_cos);
  s.unlisted_listed_cos = parse_double(kv, "unlisted_listed_cos", s.unlisted_listed_cos);
  s.max_pairwise_cos = parse_double(kv, "max_pairwise_cos", s.max_pairwise_cos);
  s.n_humans = static_cast<int>(parse_int(kv, "n_humans", s.n_humans));
  s.jitter_frames = static_cast<int>(parse_int(kv, "jitter_frames", s.jitter_frames));
  s.fps = parse_double(kv, "fps", s.fps);
  return s;
}

SynthSpec read_synth_spec(const std::string& path) { return synth_spec_from(read_key_values(path)); }

void write_synth_spec(const SynthSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "seed = " << spec.seed << "\n"
      << "dim = " << spec.dim << "\n"
      << "n_frames = " << spec.n_frames << "\n"
      << "n_relevant = " << spec.n_relevant << "\n"
      << "n_listed = " << spec.n_listed << "\n"
      << "n_unlisted = " << spec.n_unlisted << "\n"
      << "noise_sigma = " << fmt(spec.noise_sigma) << "\n"
      << "murk_level = " << fmt(spec.murk_level) << "\n"
      << "theme_weight = " << fmt(spec.theme_weight) << "\n"
      << "murk_theme_cos = " << fmt(spec.murk_theme_cos) << "\n"
      << "unlisted_listed_cos = " << fmt(spec.unlisted_listed_cos) << "\n"
      << "max_pairwise_cos = " << fmt(spec.max_pairwise_cos) << "\n"
      << "n_humans = " << spec.n_humans << "\n"
      << "jitter_frames = " << spec.jitter_frames << "\n"
      << "fps = " << fmt(spec.fps) << "\n";
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

}  // namespace merlion
