#include "merlion/sampler.hpp"

#include "merlion/vector_ops.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace merlion {

const char* to_string(SamplerDecision::Action a) {
  switch (a) {
    case SamplerDecision::Action::seed_fill: return "seed_fill";
    case SamplerDecision::Action::accepted: return "accepted";
    case SamplerDecision::Action::rejected_gate: return "rejected_gate";
    case SamplerDecision::Action::rejected_surprise: return "rejected_surprise";
    case SamplerDecision::Action::rejected_post_enhancement: return "rejected_post_enhancement";
  }
  return "unknown";
}

SamplerDecision::Action action_from_string(const std::string& s) {
  if (s == "seed_fill") return SamplerDecision::Action::seed_fill;
  if (s == "accepted") return SamplerDecision::Action::accepted;
  if (s == "rejected_gate") return SamplerDecision::Action::rejected_gate;
  if (s == "rejected_surprise") return SamplerDecision::Action::rejected_surprise;
  if (s == "rejected_post_enhancement") return SamplerDecision::Action::rejected_post_enhancement;
  throw std::invalid_argument("unknown sampler action: " + s);
}

SampleSet::SampleSet(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
}

std::vector<FrameIndex> SampleSet::frame_indices() const {
  std::vector<FrameIndex> out;
  out.reserve(entries_.size());
  for (const SampleEntry& e : entries_) out.push_back(e.frame_index);
  return out;
}

void SampleSet::append(SampleEntry entry) {
  if (!entries_.empty() && entry.frame_index <= entries_.back().frame_index) {
    throw std::invalid_argument("out-of-order frame_index " + std::to_string(entry.frame_index));
  }
  entries_.push_back(std::move(entry));
}

double surprise(const Vector& candidate_feature, const SampleSet& set, Metric metric) {
  if (set.entries().empty()) throw std::invalid_argument("surprise undefined on empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const SampleEntry& e : set.entries()) {
    best = std::min(best, distance(candidate_feature, e.sampler_feature, metric));
  }
  return best;
}

namespace {

// Mean nearest-neighbor distance over an entry subset; skip marks an excluded
// position so trim candidates can be scored without copying the set.
double mean_nn_distance(const std::vector<SampleEntry>& entries, Metric metric,
                        std::size_t skip = std::numeric_limits<std::size_t>::max()) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == skip) continue;
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (j == i || j == skip) continue;
      nn = std::min(nn, distance(entries[i].sampler_feature, entries[j].sampler_feature, metric));
    }
    sum += nn;
    ++count;
  }
  return sum / static_cast<double>(count);
}

}  // namespace

double pack_threshold(const SampleSet& set, Metric metric) {
  if (set.entries().size() < 2) throw std::invalid_argument("gamma undefined on sets smaller than 2");
  return mean_nn_distance(set.entries(), metric);
}

FrameIndex trim_sample_set(SampleSet& set, Metric metric) {
  const std::vector<SampleEntry>& entries = set.entries();
  if (static_cast<int>(entries.size()) <= set.capacity()) {
    throw std::invalid_argument("trim requires more than capacity entries");
  }
  // Remove the most redundant entry: the one whose removal leaves the best
  // packed remainder. With fewer than 3 entries every removal ties, so the
  // oldest goes and the newest survives.
  std::size_t best_pos = 0;
  double best_gamma = -std::numeric_limits<double>::infinity();
  if (entries.size() >= 3) {
    for (std::size_t skip = 0; skip < entries.size(); ++skip) {
      const double g = mean_nn_distance(entries, metric, skip);
      if (g > best_gamma) {  // strict: ties keep the earliest (oldest) position
        best_gamma = g;
        best_pos = skip;
      }
    }
  }
  const FrameIndex removed = entries[best_pos].frame_index;
  set.remove_at(best_pos);
  return removed;
}

SamplerDecision observe(const Candidate& candidate, SampleSet& state, const SamplerConfig& config) {
  if (!state.entries().empty() && candidate.frame_index <= state.entries().back().frame_index) {
    throw std::invalid_argument("out-of-order frame_index " + std::to_string(candidate.frame_index));
  }
  SamplerDecision decision;
  const bool seeding = state.offered() < state.capacity();
  state.note_offer();

  SampleEntry entry{candidate.frame_index, candidate.timestamp, candidate.feature,
                    candidate.embedding, candidate.enhanced};
  if (seeding) {
    state.append(std::move(entry));
    decision.action = SamplerDecision::Action::seed_fill;
    return decision;
  }

  decision.alpha = surprise(candidate.feature, state, config.metric);
  // Against a singleton set the packing threshold degenerates; any distinct
  // frame counts as surprising, so the bar is 0.
  const bool singleton = state.entries().size() < 2;
  decision.gamma = singleton ? 0.0 : pack_threshold(state, config.metric);
  const double bar = *decision.gamma;
  if (*decision.alpha > bar) {
    state.append(std::move(entry));
    decision.action = SamplerDecision::Action::accepted;
    while (static_cast<int>(state.entries().size()) > state.capacity()) {
      decision.trimmed.push_back(trim_sample_set(state, config.metric));
    }
  } else {
    decision.action = SamplerDecision::Action::rejected_surprise;
  }
  return decision;
}

}  // namespace merlion
