#pragma once

// Naive offline re-implementation of the full sampling loop, used as the
// oracle in equivalence tests and by the `oracle` CLI subcommand. Everything
// here is plain loops over std::vector<double> on purpose: no Eigen, no code
// shared with the streaming path.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace merlion::reference {

struct RefFrame {
  std::uint64_t frame_index = 0;
  double timestamp = 0.0;
  std::vector<double> embedding;
};

struct RefConfig {
  int capacity = 6;
  double tau_ss = 40.0;
  double tau_ses = 70.0;
  double softmax_scale = 100.0;
  std::string metric = "euclidean";    // euclidean | cosine | l1
  std::string transform = "l1";        // l1 | l2
  std::string seed_policy = "gated_count";
  bool gate_enabled = true;
};

struct RefDecision {
  std::uint64_t frame_index = 0;
  std::string action;
  std::optional<double> gate_score;
  std::optional<double> ses_score;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::vector<std::uint64_t> trimmed;
};

struct RefResult {
  std::vector<std::uint64_t> final_indices;
  std::vector<RefDecision> decisions;
};

// queries: positive first, then negatives. enhanced: optional per-frame
// replacement embeddings (same order as frames) for replaying an enhanced
// run; a nullopt element replays an enhancement failure (frame skipped).
RefResult run(const std::vector<RefFrame>& frames, const std::vector<std::vector<double>>& queries,
              const RefConfig& config,
              const std::vector<std::optional<std::vector<double>>>* enhanced = nullptr);

}  // namespace merlion::reference
