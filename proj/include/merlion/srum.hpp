#pragma once

#include "merlion/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace merlion {

struct HumanSampleSet {
  std::string evaluator_id;
  std::vector<FrameIndex> frame_indices;
};

// frame_index -> ground-truth labels; every evaluated frame must be present,
// possibly with an empty set.
using LabelMap = std::map<FrameIndex, std::set<std::string>>;
using TimestampMap = std::map<FrameIndex, double>;

struct SrumReport {
  struct PerFrame {
    FrameIndex frame_index = 0;
    std::optional<FrameIndex> matched_human_frame;
    int semantic = 0;              // {0,1}
    double representative = 0.0;   // [0,1]
  };
  std::vector<PerFrame> frames;
  double total = 0.0;  // mean over K of weight*semantic + (1-weight)*representative
};

// 1 iff the frame shares a label with the union of the human set's labels.
int semantic_score(FrameIndex auto_frame, const HumanSampleSet& human, const LabelMap& labels);

// Linear time decay within window_seconds, maximized over label-sharing human
// frames; 0 when no human frame shares a label.
double representative_score(FrameIndex auto_frame, const HumanSampleSet& human, const LabelMap& labels,
                            const TimestampMap& timestamps, double window_seconds);

// Total over exactly K slots; a short automated set is padded with zero-score
// slots. srum_weight blends semantic against representative.
SrumReport srum_score(const std::vector<FrameIndex>& auto_frames, const HumanSampleSet& human,
                      const LabelMap& labels, const TimestampMap& timestamps, double srum_weight,
                      double window_seconds, int capacity);

// Leave-one-out: score each evaluator against every other and average.
double human_benchmark(const std::vector<HumanSampleSet>& all_humans, const LabelMap& labels,
                       const TimestampMap& timestamps, double srum_weight, double window_seconds,
                       int capacity);

}  // namespace merlion
