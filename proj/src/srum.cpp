#include "merlion/srum.hpp"

#include "merlion/log.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace merlion {

namespace {

const std::set<std::string>& labels_of(FrameIndex frame, const LabelMap& labels) {
  auto it = labels.find(frame);
  if (it == labels.end()) {
    throw std::out_of_range("no labels for frame_index " + std::to_string(frame));
  }
  return it->second;
}

double timestamp_of(FrameIndex frame, const TimestampMap& timestamps) {
  auto it = timestamps.find(frame);
  if (it == timestamps.end()) {
    throw std::out_of_range("no timestamp for frame_index " + std::to_string(frame));
  }
  return it->second;
}

bool share_label(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const std::string& l : a) {
    if (b.count(l) > 0) return true;
  }
  return false;
}

}  // namespace

int semantic_score(FrameIndex auto_frame, const HumanSampleSet& human, const LabelMap& labels) {
  const std::set<std::string>& mine = labels_of(auto_frame, labels);
  if (mine.empty()) return 0;
  for (FrameIndex h : human.frame_indices) {
    if (share_label(mine, labels_of(h, labels))) return 1;
  }
  return 0;
}

double representative_score(FrameIndex auto_frame, const HumanSampleSet& human, const LabelMap& labels,
                            const TimestampMap& timestamps, double window_seconds) {
  if (window_seconds <= 0.0) throw std::invalid_argument("window must be positive");
  const std::set<std::string>& mine = labels_of(auto_frame, labels);
  const double t = timestamp_of(auto_frame, timestamps);
  double best = 0.0;
  for (FrameIndex h : human.frame_indices) {
    if (!share_label(mine, labels_of(h, labels))) continue;
    const double decay = 1.0 - std::abs(t - timestamp_of(h, timestamps)) / window_seconds;
    best = std::max(best, std::max(0.0, decay));
  }
  return best;
}

SrumReport srum_score(const std::vector<FrameIndex>& auto_frames, const HumanSampleSet& human,
                      const LabelMap& labels, const TimestampMap& timestamps, double srum_weight,
                      double window_seconds, int capacity) {
  if (srum_weight < 0.0 || srum_weight > 1.0) throw std::invalid_argument("srum_weight must be in [0,1]");
  if (window_seconds <= 0.0) throw std::invalid_argument("window must be positive");
  if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  if (static_cast<int>(auto_frames.size()) > capacity) {
    throw std::invalid_argument("automated set larger than capacity");
  }
  if (static_cast<int>(auto_frames.size()) < capacity) {
    log::info("srum: automated set has " + std::to_string(auto_frames.size()) + " of " +
              std::to_string(capacity) + " frames; missing slots score 0");
  }

  SrumReport report;
  double sum = 0.0;
  for (FrameIndex a : auto_frames) {
    SrumReport::PerFrame pf;
    pf.frame_index = a;
    pf.semantic = semantic_score(a, human, labels);
    const std::set<std::string>& mine = labels_of(a, labels);
    const double t = timestamp_of(a, timestamps);
    for (FrameIndex h : human.frame_indices) {
      if (!share_label(mine, labels_of(h, labels))) continue;
      const double decay = std::max(0.0, 1.0 - std::abs(t - timestamp_of(h, timestamps)) / window_seconds);
      if (decay > pf.representative) {
        pf.representative = decay;
        pf.matched_human_frame = h;
      }
    }
    sum += srum_weight * pf.semantic + (1.0 - srum_weight) * pf.representative;
    report.frames.push_back(pf);
  }
  // Pad-with-zero policy: short sets divide by full capacity.
  report.total = sum / static_cast<double>(capacity);
  return report;
}

double human_benchmark(const std::vector<HumanSampleSet>& all_humans, const LabelMap& labels,
                       const TimestampMap& timestamps, double srum_weight, double window_seconds,
                       int capacity) {
  if (all_humans.size() < 2) throw std::invalid_argument("human benchmark needs at least 2 evaluators");
  double outer = 0.0;
  for (const HumanSampleSet& mine : all_humans) {
    double inner = 0.0;
    for (const HumanSampleSet& other : all_humans) {
      if (&other == &mine) continue;
      inner += srum_score(mine.frame_indices, other, labels, timestamps, srum_weight, window_seconds,
                          capacity)
                   .total;
    }
    outer += inner / static_cast<double>(all_humans.size() - 1);
  }
  return outer / static_cast<double>(all_humans.size());
}

}  // namespace merlion
