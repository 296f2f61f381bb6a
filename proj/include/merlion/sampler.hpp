#pragma once

#include "merlion/types.hpp"

#include <optional>
#include <vector>

namespace merlion {

struct SamplerDecision {
  enum class Action {
    seed_fill,
    accepted,
    rejected_gate,
    rejected_surprise,
    rejected_post_enhancement,
  };
  Action action = Action::rejected_surprise;
  std::optional<double> alpha;  // present iff the surprise test ran
  std::optional<double> gamma;  // the admission bar; 0 against a singleton set
  std::vector<FrameIndex> trimmed;
};

const char* to_string(SamplerDecision::Action a);
SamplerDecision::Action action_from_string(const std::string& s);

// Capacity-K sample set in insertion order. Single writer; offered() counts
// observe calls so the seed-fill branch knows when the set is warm.
class SampleSet {
 public:
  explicit SampleSet(int capacity);

  int capacity() const { return capacity_; }
  std::int64_t offered() const { return offered_; }
  const std::vector<SampleEntry>& entries() const { return entries_; }
  std::vector<FrameIndex> frame_indices() const;

  // Internal hooks used by observe/trim_sample_set.
  void append(SampleEntry entry);
  void remove_at(std::size_t pos) { entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(pos)); }
  void note_offer() { ++offered_; }

 private:
  int capacity_;
  std::int64_t offered_ = 0;
  std::vector<SampleEntry> entries_;
};

// Candidate handed to observe: feature must already be sampler-transformed.
struct Candidate {
  FrameIndex frame_index = 0;
  double timestamp = 0.0;
  Vector embedding;  // raw or enhanced, whichever is being sampled
  Vector feature;
  bool enhanced = false;
};

// Surprise score: minimum distance from the candidate feature to any entry.
double surprise(const Vector& candidate_feature, const SampleSet& set, Metric metric);

// Packing threshold: mean over entries of each entry's nearest-neighbor
// distance within the set. Requires at least two entries.
double pack_threshold(const SampleSet& set, Metric metric);

// Removes the entry whose removal leaves the largest packing threshold; ties
// go to the smaller (older) frame_index. Returns the removed index.
FrameIndex trim_sample_set(SampleSet& set, Metric metric);

// One streaming step: seed-fill while fewer than K offers have been made,
// otherwise admit iff alpha > gamma (alpha > 0 against a singleton set) and
// trim back down to capacity.
SamplerDecision observe(const Candidate& candidate, SampleSet& state, const SamplerConfig& config);

// Entries in insertion order (alias for readability at call sites).
inline const std::vector<SampleEntry>& summary(const SampleSet& state) { return state.entries(); }

}  // namespace merlion
