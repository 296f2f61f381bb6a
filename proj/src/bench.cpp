#include "merlion/bench.hpp"

#include "merlion/pipeline.hpp"
#include "merlion/srum.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace merlion {

double regime_tau_ss(double murk_level) {
  if (murk_level < 0.125) return 70.0;
  if (murk_level < 0.375) return 50.0;
  return 40.0;
}

namespace {

double mean_srum(const std::vector<FrameIndex>& sample, const SynthOutput& gen,
                 const TimestampMap& timestamps, const SamplerConfig& config, double window) {
  double total = 0.0;
  for (const HumanSampleSet& human : gen.humans) {
    total += srum_score(sample, human, gen.labels, timestamps, config.srum_weight, window,
                        config.capacity)
                 .total;
  }
  return total / static_cast<double>(gen.humans.size());
}

}  // namespace

BenchResult compare_runs(const SynthSpec& base, const std::vector<std::uint64_t>& seeds,
                         const std::vector<double>& murk_levels) {
  if (seeds.empty() || murk_levels.empty()) {
    throw std::invalid_argument("need at least one seed and one murk level");
  }
  BenchResult result;
  result.seeds = static_cast<int>(seeds.size());
  const double top_level = *std::max_element(murk_levels.begin(), murk_levels.end());

  for (double level : murk_levels) {
    SamplerConfig config;
    config.tau_ss = regime_tau_ss(level);

    BenchRow row;
    row.murk_level = level;
    row.tau_ss = config.tau_ss;
    const bool is_top = level == top_level;

    for (std::uint64_t seed : seeds) {
      SynthSpec spec = base;
      spec.seed = seed;
      spec.murk_level = level;
      const SynthOutput gen = generate_stream(spec);

      TimestampMap timestamps;
      for (const FrameRecord& f : gen.murky) timestamps[f.frame_index] = f.timestamp;
      const double duration = gen.murky.back().timestamp - gen.murky.front().timestamp;
      const double window = duration > 0.0 ? 0.1 * duration : 1.0;

      MemorySource murky_src(gen.murky);
      const RunResult merlion = run_merlion(murky_src, gen.queries, config);

      MemorySource murky_src_e(gen.murky);
      MockDemurkEnhancer demurk(gen.murk_vector, level);
      const RunResult merlion_e = run_merlion_e(murky_src_e, gen.queries, config, demurk);

      MemorySource murky_src_s(gen.murky);
      const RunResult surprise = run_surprise_only(murky_src_s, config);

      MemorySource clean_src(gen.clean);
      const RunResult surprise_enh = run_surprise_only(clean_src, config);

      const double m_score = mean_srum(merlion.set.frame_indices(), gen, timestamps, config, window);
      const double e_score =
          mean_srum(merlion_e.set.frame_indices(), gen, timestamps, config, window);
      const double s_score = mean_srum(surprise.set.frame_indices(), gen, timestamps, config, window);
      const double se_score =
          mean_srum(surprise_enh.set.frame_indices(), gen, timestamps, config, window);

      row.merlion += m_score;
      row.merlion_e += e_score;
      row.surprise_only += s_score;
      row.surprise_enhanced += se_score;
      row.human_score += human_benchmark(gen.humans, gen.labels, timestamps, config.srum_weight,
                                         window, config.capacity);

      if (is_top) {
        result.merlion_scores.push_back(m_score);
        result.merlion_e_scores.push_back(e_score);
        result.surprise_scores.push_back(s_score);
        if (e_score > s_score) ++result.e_beats_surprise;
        if (e_score > m_score) ++result.e_beats_merlion;
      }
    }
    const double n = static_cast<double>(seeds.size());
    row.merlion /= n;
    row.merlion_e /= n;
    row.surprise_only /= n;
    row.surprise_enhanced /= n;
    row.human_score /= n;
    result.rows.push_back(row);
  }
  return result;
}

std::string format_table(const BenchResult& result) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%6s %7s %9s %10s %10s %13s %7s\n", "murk", "tau_ss", "merlion",
                "merlion-e", "surprise", "surprise+enh", "human");
  out += line;
  for (const BenchRow& row : result.rows) {
    std::snprintf(line, sizeof(line), "%6.2f %7.0f %9.3f %10.3f %10.3f %13.3f %7.3f\n",
                  row.murk_level, row.tau_ss, row.merlion, row.merlion_e, row.surprise_only,
                  row.surprise_enhanced, row.human_score);
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "seeds=%d  e>surprise: %d/%d  e>merlion: %d/%d (highest murk level)\n", result.seeds,
                result.e_beats_surprise, result.seeds, result.e_beats_merlion, result.seeds);
  out += line;
  return out;
}

}  // namespace merlion
