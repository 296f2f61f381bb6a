#include "merlion/bench.hpp"
#include "merlion/config_file.hpp"
#include "merlion/log.hpp"
#include "merlion/pipeline.hpp"
#include "merlion/reference.hpp"
#include "merlion/srum.hpp"
#include "merlion/stream_io.hpp"
#include "merlion/synth.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace merlion;

namespace {

// Flag-level overrides layered on top of a config file (or the defaults).
struct ConfigFlags {
  std::string config_path;
  std::optional<int> capacity;
  std::optional<double> tau_ss;
  std::optional<double> tau_ses;
  std::optional<double> softmax_scale;
  std::optional<std::string> metric;
  std::optional<std::string> transform;
  std::optional<std::string> seed_policy;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "sampler config file (key = value)");
    cmd->add_option("--capacity", capacity, "sample set capacity K");
    cmd->add_option("--tau-ss", tau_ss, "semantic gate threshold in [0,100]");
    cmd->add_option("--tau-ses", tau_ses, "post-enhancement threshold in [0,100]");
    cmd->add_option("--softmax-scale", softmax_scale, "gate softmax scale s");
    cmd->add_option("--metric", metric, "euclidean | cosine | l1");
    cmd->add_option("--transform", transform, "l1 | l2");
    cmd->add_option("--seed-policy", seed_policy, "gated_count | raw_index");
  }

  SamplerConfig resolve() const {
    SamplerConfig c = config_path.empty() ? SamplerConfig{} : read_sampler_config(config_path);
    if (capacity) c.capacity = *capacity;
    if (tau_ss) c.tau_ss = *tau_ss;
    if (tau_ses) c.tau_ses = *tau_ses;
    if (softmax_scale) c.softmax_scale = *softmax_scale;
    if (metric) c.metric = metric_from_string(*metric);
    if (transform) c.transform = transform_from_string(*transform);
    if (seed_policy) c.seed_policy = seed_policy_from_string(*seed_policy);
    if (c.capacity < 1) throw std::invalid_argument("capacity must be >= 1");
    if (c.tau_ss < 0.0 || c.tau_ss > 100.0) throw std::invalid_argument("tau_ss must be in [0,100]");
    if (c.tau_ses < 0.0 || c.tau_ses > 100.0) {
      throw std::invalid_argument("tau_ses must be in [0,100]");
    }
    if (c.softmax_scale <= 0.0) throw std::invalid_argument("softmax_scale must be positive");
    return c;
  }
};

void write_run_outputs(const RunResult& result, const SamplerConfig& config, const fs::path& out) {
  fs::create_directories(out);
  write_decision_log(result.decisions, (out / "decisions.jsonl").string());
  write_summary(result.set.frame_indices(), (out / "summary.txt").string());
  write_stats(result.stats, (out / "stats.txt").string());
  write_sampler_config(config, (out / "config.cfg").string());
  std::cout << "sampled " << result.set.entries().size() << " frame(s):";
  for (FrameIndex i : result.set.frame_indices()) std::cout << " " << i;
  std::cout << "\noutputs in " << out.string() << "\n";
}

std::unique_ptr<Enhancer> make_enhancer(const std::string& spec, const std::string& murk_vector_path,
                                        std::optional<double> murk_level, int timeout_ms) {
  if (spec == "identity") return std::make_unique<IdentityEnhancer>();
  if (spec == "demurk") {
    if (murk_vector_path.empty() || !murk_level) {
      throw std::invalid_argument("demurk enhancer needs --murk-vector and --murk-level");
    }
    const std::vector<FrameRecord> records = read_stream(murk_vector_path);
    if (records.size() != 1) {
      throw std::invalid_argument(murk_vector_path + ": expected exactly one murk vector record");
    }
    return std::make_unique<MockDemurkEnhancer>(records.front().embedding, *murk_level);
  }
  if (spec.rfind("aligned:", 0) == 0) {
    return std::make_unique<AlignedStreamEnhancer>(spec.substr(8));
  }
  if (spec.rfind("subprocess:", 0) == 0) {
    return std::make_unique<SubprocessEnhancer>(spec.substr(11), timeout_ms);
  }
  throw std::invalid_argument("unknown enhancer '" + spec +
                              "' (want identity, demurk, aligned:PATH or subprocess:CMD)");
}

double derive_window(double requested, const TimestampMap& timestamps) {
  if (requested > 0.0) return requested;
  if (timestamps.size() < 2) return 1.0;
  const double span = std::prev(timestamps.end())->second - timestamps.begin()->second;
  return span > 0.0 ? 0.1 * span : 1.0;
}

bool close_enough(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string diff_optional(const char* name, const std::optional<double>& got,
                          const std::optional<double>& want, double tol) {
  if (got.has_value() != want.has_value()) {
    return std::string(name) + (got ? " unexpectedly present" : " missing");
  }
  if (got && !close_enough(*got, *want, tol)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s %.17g vs reference %.17g", name, *want, *got);
    return buf;
  }
  return "";
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

int run_command(const std::string& stream_path, const std::string& queries_path,
                const ConfigFlags& flags, bool no_gate, const std::string& out_dir) {
  const SamplerConfig config = flags.resolve();
  FileSource source(stream_path);
  if (no_gate) {
    write_run_outputs(run_surprise_only(source, config), config, out_dir);
    return 0;
  }
  if (queries_path.empty()) throw std::invalid_argument("--queries is required unless --no-gate");
  write_run_outputs(run_merlion(source, read_queries(queries_path), config), config, out_dir);
  return 0;
}

int run_e_command(const std::string& stream_path, const std::string& queries_path,
                  const ConfigFlags& flags, const std::string& enhancer_spec,
                  const std::string& murk_vector_path, std::optional<double> murk_level,
                  int timeout_ms, const std::string& on_failure, const std::string& out_dir) {
  const SamplerConfig config = flags.resolve();
  FailurePolicy policy;
  if (on_failure == "skip") {
    policy = FailurePolicy::skip_frame;
  } else if (on_failure == "abort") {
    policy = FailurePolicy::abort_run;
  } else {
    throw std::invalid_argument("--on-failure must be skip or abort");
  }
  auto enhancer = make_enhancer(enhancer_spec, murk_vector_path, murk_level, timeout_ms);
  FileSource source(stream_path);
  const RunResult result =
      run_merlion_e(source, read_queries(queries_path), config, *enhancer, policy);
  write_run_outputs(result, config, out_dir);
  return 0;
}

int eval_command(const std::string& auto_path, const std::string& stream_path,
                 const std::string& humans_path, const std::string& labels_path, double weight,
                 double window, int capacity, const std::string& out_path) {
  const std::vector<FrameIndex> auto_frames = read_summary(auto_path);
  const std::vector<HumanSampleSet> humans = read_humans(humans_path);
  const LabelMap labels = read_labels(labels_path);
  if (humans.empty()) throw std::invalid_argument(humans_path + ": no evaluators");

  TimestampMap timestamps;
  StreamReader reader(stream_path);
  while (auto r = reader.next()) timestamps[r->frame_index] = r->timestamp;
  const double w = derive_window(window, timestamps);

  std::ostringstream report;
  double mean = 0.0;
  for (const HumanSampleSet& h : humans) {
    const SrumReport r = srum_score(auto_frames, h, labels, timestamps, weight, w, capacity);
    report << "evaluator = " << h.evaluator_id << "\n";
    for (const auto& f : r.frames) {
      report << "  frame " << f.frame_index << ": semantic = " << f.semantic
             << ", representative = ";
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", f.representative);
      report << buf;
      if (f.matched_human_frame) report << ", matched_human_frame = " << *f.matched_human_frame;
      report << "\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", r.total);
    report << "  total = " << buf << "\n";
    mean += r.total;
  }
  mean /= static_cast<double>(humans.size());
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", mean);
  report << "mean_srum = " << buf << "\n";
  if (humans.size() >= 2) {
    std::snprintf(buf, sizeof(buf), "%.6f",
                  human_benchmark(humans, labels, timestamps, weight, w, capacity));
    report << "human_benchmark = " << buf << "\n";
  }

  std::cout << report.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
    out << report.str();
  }
  return 0;
}

int synth_command(const SynthSpec& spec, const std::string& out_dir) {
  const SynthOutput gen = generate_stream(spec);
  const fs::path out(out_dir);
  fs::create_directories(out);
  write_stream(gen.murky, (out / "stream.mef").string());
  write_stream(gen.clean, (out / "clean.mef").string());
  write_queries(gen.queries, (out / "queries.mef").string());
  write_stream({{0, 0.0, gen.murk_vector, {}}}, (out / "murk.mef").string());
  write_labels(gen.labels, (out / "labels.jsonl").string());
  write_humans(gen.humans, (out / "humans.jsonl").string());
  write_synth_spec(spec, (out / "spec.cfg").string());
  std::cout << "wrote " << gen.murky.size() << " frames (murky + clean twins) to " << out.string()
            << "\n";
  return 0;
}

int oracle_command(const std::string& stream_path, const std::string& queries_path,
                   const std::string& log_path, const std::string& summary_path,
                   const std::string& enhanced_path, const ConfigFlags& flags, bool no_gate,
                   double tol) {
  const SamplerConfig config = flags.resolve();
  const std::vector<DecisionRecord> log = read_decision_log(log_path);

  std::vector<reference::RefFrame> frames;
  for (const FrameRecord& r : read_stream(stream_path)) {
    frames.push_back({r.frame_index, r.timestamp, to_std(r.embedding)});
  }
  std::vector<std::vector<double>> queries;
  if (!no_gate) {
    if (queries_path.empty()) throw std::invalid_argument("--queries is required unless --no-gate");
    const QuerySet q = read_queries(queries_path);
    queries.push_back(to_std(q.positive));
    for (const Vector& n : q.negatives) queries.push_back(to_std(n));
  }

  std::optional<std::vector<std::optional<std::vector<double>>>> enhanced;
  if (!enhanced_path.empty()) {
    std::map<FrameIndex, std::vector<double>> by_index;
    for (const FrameRecord& r : read_stream(enhanced_path)) by_index[r.frame_index] = to_std(r.embedding);
    enhanced.emplace();
    for (const reference::RefFrame& f : frames) {
      const auto it = by_index.find(f.frame_index);
      if (it == by_index.end()) {
        enhanced->push_back(std::nullopt);
      } else {
        enhanced->push_back(it->second);
      }
    }
  }

  reference::RefConfig ref;
  ref.capacity = config.capacity;
  ref.tau_ss = config.tau_ss;
  ref.tau_ses = config.tau_ses;
  ref.softmax_scale = config.softmax_scale;
  ref.metric = to_string(config.metric);
  ref.transform = to_string(config.transform);
  ref.seed_policy = to_string(config.seed_policy);
  ref.gate_enabled = !no_gate;

  const reference::RefResult result =
      reference::run(frames, queries, ref, enhanced ? &*enhanced : nullptr);

  auto mismatch = [&](FrameIndex frame, const std::string& what) {
    std::cout << "MISMATCH at frame " << frame << ": " << what << "\n";
    return 3;
  };
  if (log.size() != result.decisions.size()) {
    std::cout << "MISMATCH: log has " << log.size() << " records, reference produced "
              << result.decisions.size() << "\n";
    return 3;
  }
  for (std::size_t i = 0; i < log.size(); ++i) {
    const DecisionRecord& got = log[i];
    const reference::RefDecision& want = result.decisions[i];
    if (got.frame_index != want.frame_index) {
      return mismatch(got.frame_index,
                      "frame order differs (reference saw " + std::to_string(want.frame_index) + ")");
    }
    if (to_string(got.action) != want.action) {
      return mismatch(got.frame_index,
                      "action " + std::string(to_string(got.action)) + " vs reference " + want.action);
    }
    if (got.trimmed != want.trimmed) return mismatch(got.frame_index, "trimmed set differs");
    for (const auto& [name, g, w] :
         {std::tuple{"gate_score", got.gate_score, want.gate_score},
          std::tuple{"ses_score", got.ses_score, want.ses_score},
          std::tuple{"alpha", got.alpha, want.alpha}, std::tuple{"gamma", got.gamma, want.gamma}}) {
      const std::string d = diff_optional(name, g, w, tol);
      if (!d.empty()) return mismatch(got.frame_index, d);
    }
  }
  if (!summary_path.empty()) {
    const std::vector<FrameIndex> summary = read_summary(summary_path);
    if (summary != result.final_indices) {
      std::cout << "MISMATCH: final sample set differs from " << summary_path << "\n";
      return 3;
    }
  }
  std::cout << "MATCH (" << log.size() << " records)\n";
  return 0;
}

int bench_command(const std::string& spec_path, int seeds, const std::string& murk_levels_csv,
                  const std::string& out_path) {
  SynthSpec base = spec_path.empty() ? SynthSpec{} : read_synth_spec(spec_path);
  if (seeds < 1) throw std::invalid_argument("--seeds must be >= 1");
  std::vector<std::uint64_t> seed_list;
  for (int i = 0; i < seeds; ++i) seed_list.push_back(static_cast<std::uint64_t>(i));
  std::vector<double> levels;
  std::stringstream ss(murk_levels_csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    std::size_t used = 0;
    levels.push_back(std::stod(token, &used));
    if (used != token.size()) throw std::invalid_argument("bad murk level: " + token);
  }
  if (levels.empty()) throw std::invalid_argument("--murk-levels produced no levels");

  const BenchResult result = compare_runs(base, seed_list, levels);
  const std::string table = format_table(result);
  std::cout << table;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
    out << table;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MERLION streaming informative sampler"};
  app.require_subcommand(1);

  std::string stream_path, queries_path, out_dir;
  bool no_gate = false;
  ConfigFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "sample a stream with the semantic gate");
  run->add_option("--stream", stream_path, "embedding stream file")->required();
  run->add_option("--queries", queries_path, "query stream file, positive record first");
  run->add_flag("--no-gate", no_gate, "disable the gate (surprise-only baseline)");
  run->add_option("--out", out_dir, "output directory")->required();
  run_flags.attach(run);

  std::string e_stream, e_queries, e_out, enhancer_spec, murk_vector_path;
  std::string on_failure = "skip";
  std::optional<double> murk_level;
  int timeout_ms = 5000;
  ConfigFlags run_e_flags;
  CLI::App* run_e = app.add_subcommand("run-e", "sample with selective enhancement");
  run_e->add_option("--stream", e_stream, "embedding stream file")->required();
  run_e->add_option("--queries", e_queries, "query stream file, positive record first")->required();
  run_e->add_option("--enhancer", enhancer_spec,
                    "identity | demurk | aligned:PATH | subprocess:CMD")
      ->required();
  run_e->add_option("--murk-vector", murk_vector_path, "murk vector stream file (demurk)");
  run_e->add_option("--murk-level", murk_level, "murk level m in [0,1) (demurk)");
  run_e->add_option("--timeout-ms", timeout_ms, "subprocess response timeout");
  run_e->add_option("--on-failure", on_failure, "skip | abort");
  run_e->add_option("--out", e_out, "output directory")->required();
  run_e_flags.attach(run_e);

  std::string auto_path, eval_stream, humans_path, labels_path, eval_out;
  double weight = 0.5, window = 0.0;
  int eval_capacity = 6;
  CLI::App* eval = app.add_subcommand("eval", "score a sample set against human selections");
  eval->add_option("--auto", auto_path, "automated summary file (one frame index per line)")
      ->required();
  eval->add_option("--stream", eval_stream, "stream file providing timestamps")->required();
  eval->add_option("--humans", humans_path, "human selections, one JSON record per line")->required();
  eval->add_option("--labels", labels_path, "ground-truth labels, one JSON record per line")
      ->required();
  eval->add_option("--weight", weight, "semantic weight in [0,1]");
  eval->add_option("--window", window, "representative window seconds; 0 derives 10% of duration");
  eval->add_option("--capacity", eval_capacity, "sample budget K");
  eval->add_option("--out", eval_out, "also write the report to this file");

  std::string spec_path, synth_out;
  std::optional<std::uint64_t> synth_seed;
  std::optional<double> synth_murk, synth_noise, synth_fps;
  std::optional<int> synth_frames, synth_dim, synth_humans, synth_jitter;
  CLI::App* synth = app.add_subcommand("synth", "generate a labeled synthetic stream");
  synth->add_option("--spec", spec_path, "synth spec file (key = value)");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--murk-level", synth_murk, "murk level m in [0,1)");
  synth->add_option("--n-frames", synth_frames, "stream length");
  synth->add_option("--dim", synth_dim, "embedding dimension");
  synth->add_option("--noise-sigma", synth_noise, "per-frame gaussian noise");
  synth->add_option("--n-humans", synth_humans, "synthetic evaluator count");
  synth->add_option("--jitter", synth_jitter, "evaluator jitter in frames");
  synth->add_option("--fps", synth_fps, "frames per second for timestamps");
  synth->add_option("--out", synth_out, "output directory")->required();

  std::string oracle_stream, oracle_queries, log_path, summary_path, enhanced_path;
  bool oracle_no_gate = false;
  double tol = 1e-9;
  ConfigFlags oracle_flags;
  CLI::App* oracle = app.add_subcommand("oracle", "recompute a run offline and diff the log");
  oracle->add_option("--stream", oracle_stream, "embedding stream file")->required();
  oracle->add_option("--queries", oracle_queries, "query stream file");
  oracle->add_option("--log", log_path, "decision log to verify")->required();
  oracle->add_option("--summary", summary_path, "summary file to verify");
  oracle->add_option("--enhanced", enhanced_path, "aligned enhanced stream for run-e replay");
  oracle->add_flag("--no-gate", oracle_no_gate, "replay a gate-disabled run");
  oracle->add_option("--tol", tol, "relative score tolerance");
  oracle_flags.attach(oracle);

  std::string bench_spec, bench_out;
  int bench_seeds = 20;
  std::string murk_levels = "0,0.25,0.5";
  CLI::App* bench = app.add_subcommand("bench", "compare methods over seeded synthetic streams");
  bench->add_option("--spec", bench_spec, "base synth spec file");
  bench->add_option("--seeds", bench_seeds, "number of seeds");
  bench->add_option("--murk-levels", murk_levels, "comma-separated murk levels");
  bench->add_option("--out", bench_out, "also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return run_command(stream_path, queries_path, run_flags, no_gate, out_dir);
    if (run_e->parsed()) {
      return run_e_command(e_stream, e_queries, run_e_flags, enhancer_spec, murk_vector_path,
                           murk_level, timeout_ms, on_failure, e_out);
    }
    if (eval->parsed()) {
      return eval_command(auto_path, eval_stream, humans_path, labels_path, weight, window,
                          eval_capacity, eval_out);
    }
    if (synth->parsed()) {
      SynthSpec spec = spec_path.empty() ? SynthSpec{} : read_synth_spec(spec_path);
      if (synth_seed) spec.seed = *synth_seed;
      if (synth_murk) spec.murk_level = *synth_murk;
      if (synth_frames) spec.n_frames = *synth_frames;
      if (synth_dim) spec.dim = *synth_dim;
      if (synth_noise) spec.noise_sigma = *synth_noise;
      if (synth_humans) spec.n_humans = *synth_humans;
      if (synth_jitter) spec.jitter_frames = *synth_jitter;
      if (synth_fps) spec.fps = *synth_fps;
      return synth_command(spec, synth_out);
    }
    if (oracle->parsed()) {
      return oracle_command(oracle_stream, oracle_queries, log_path, summary_path, enhanced_path,
                            oracle_flags, oracle_no_gate, tol);
    }
    if (bench->parsed()) return bench_command(bench_spec, bench_seeds, murk_levels, bench_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
