#pragma once

#include "merlion/synth.hpp"
#include "merlion/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace merlion {

// One visibility row of the comparison table: mean SRUM per method over seeds.
struct BenchRow {
  double murk_level = 0.0;
  double tau_ss = 0.0;
  double merlion = 0.0;
  double merlion_e = 0.0;
  double surprise_only = 0.0;
  double surprise_enhanced = 0.0;
  double human_score = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  // Per-seed scores at the highest murk level, for ordering statistics.
  std::vector<double> merlion_scores;
  std::vector<double> merlion_e_scores;
  std::vector<double> surprise_scores;
  int seeds = 0;
  int e_beats_surprise = 0;
  int e_beats_merlion = 0;
};

// Threshold regime for a murk level: clear -> 70, moderate -> 50, low -> 40.
double regime_tau_ss(double murk_level);

// Runs MERLION, MERLION-E (mock_demurk), surprise-only, and surprise-only on
// the clean twin across seeds x murk levels, scoring each against the
// synthetic evaluators.
BenchResult compare_runs(const SynthSpec& base, const std::vector<std::uint64_t>& seeds,
                         const std::vector<double>& murk_levels);

std::string format_table(const BenchResult& result);

}  // namespace merlion
