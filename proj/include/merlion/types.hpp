#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace merlion {

// All pipeline math runs in double; stream files store 32-bit floats.
using Vector = Eigen::VectorXd;
using FrameIndex = std::uint64_t;

enum class Metric { euclidean, cosine, l1 };
enum class Transform { l1, l2 };

// Seed-fill interpretation of the "t <= K" branch: count frames offered to the
// sampler (gate-passing), or raw stream position. Gated count is the default.
enum class SeedPolicy { gated_count, raw_index };

struct FrameRecord {
  FrameIndex frame_index = 0;
  double timestamp = 0.0;  // seconds, non-decreasing within a stream
  Vector embedding;
  std::set<std::string> labels;  // ground truth only; never read by samplers
};

// One positive query plus at least one negative query, all of equal dim.
struct QuerySet {
  Vector positive;
  std::vector<Vector> negatives;
};

struct SamplerConfig {
  int capacity = 6;                     // K
  double tau_ss = 40.0;                 // semantic gate threshold, [0,100]
  double tau_ses = 70.0;                // post-enhancement threshold, [0,100]
  double softmax_scale = 100.0;         // s in the gate softmax
  Metric metric = Metric::euclidean;
  Transform transform = Transform::l1;
  SeedPolicy seed_policy = SeedPolicy::gated_count;
  double srum_weight = 0.5;             // weight of the semantic component
  double rep_window_seconds = 0.0;      // 0 = derive as 10% of stream duration
};

struct SampleEntry {
  FrameIndex frame_index = 0;
  double timestamp = 0.0;
  Vector sampler_feature;  // sampler_transform of the embedding below
  Vector raw_embedding;    // original or enhanced, whichever was sampled
  bool enhanced = false;
};

const char* to_string(Metric m);
const char* to_string(Transform t);
const char* to_string(SeedPolicy p);
Metric metric_from_string(const std::string& s);
Transform transform_from_string(const std::string& s);
SeedPolicy seed_policy_from_string(const std::string& s);

}  // namespace merlion
