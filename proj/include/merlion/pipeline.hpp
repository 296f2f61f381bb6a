#pragma once

#include "merlion/enhancer.hpp"
#include "merlion/sampler.hpp"
#include "merlion/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace merlion {

// Pull-based frame source so file-backed runs stay constant-memory.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<FrameRecord> next() = 0;
};

class MemorySource final : public FrameSource {
 public:
  explicit MemorySource(std::vector<FrameRecord> frames) : frames_(std::move(frames)) {}
  std::optional<FrameRecord> next() override {
    if (pos_ >= frames_.size()) return std::nullopt;
    return frames_[pos_++];
  }

 private:
  std::vector<FrameRecord> frames_;
  std::size_t pos_ = 0;
};

struct PipelineStats {
  std::uint64_t frames_seen = 0;
  std::uint64_t gate_passed = 0;
  std::uint64_t enhancement_calls = 0;
  std::uint64_t ses_rejections = 0;
  std::uint64_t accepted = 0;
  std::uint64_t trims = 0;
};

struct DecisionRecord {
  FrameIndex frame_index = 0;
  double timestamp = 0.0;
  std::optional<double> gate_score;  // absent when the gate is disabled
  std::optional<double> ses_score;   // present iff the frame was enhanced
  SamplerDecision::Action action = SamplerDecision::Action::rejected_gate;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::vector<FrameIndex> trimmed;
  bool enhanced = false;
};

struct RunResult {
  SampleSet set;
  PipelineStats stats;
  std::vector<DecisionRecord> decisions;  // one per stream frame
};

// Gate -> transform -> observe. One decision per frame.
RunResult run_merlion(FrameSource& stream, const QuerySet& queries, const SamplerConfig& config);

// Gate disabled (every frame reaches the sampler); no queries needed.
RunResult run_surprise_only(FrameSource& stream, const SamplerConfig& config);

// Gate -> enhance -> re-gate with tau_ses -> observe. Gate-passing frames are
// always enhanced (the SES accounting claim); outside the seed-fill phase a
// frame whose enhanced score fails tau_ses is skipped entirely.
RunResult run_merlion_e(FrameSource& stream, const QuerySet& queries, const SamplerConfig& config,
                        Enhancer& enhancer, FailurePolicy on_failure = FailurePolicy::skip_frame);

}  // namespace merlion
