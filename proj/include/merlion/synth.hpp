#pragma once

#include "merlion/srum.hpp"
#include "merlion/types.hpp"

#include <cstdint>
#include <vector>

namespace merlion {

// Synthetic stream blueprint. Clusters split three ways: relevant clusters are
// drawn around a shared theme direction and feed the positive query; one group
// of "listed" distractors becomes the negative queries; "unlisted" distractors
// lean toward the first listed center but appear in no query. The murk vector
// shares murk_theme_cos with the theme, so murk drags every frame toward the
// positive query; that is what makes the gate leak without enhancement.
struct SynthSpec {
  std::uint64_t seed = 1;
  int dim = 32;
  int n_frames = 240;
  int n_relevant = 6;
  int n_listed = 1;
  int n_unlisted = 2;
  double noise_sigma = 0.10;
  double murk_level = 0.5;        // m in [0,1)
  double theme_weight = 0.45;     // blend of theme into relevant centers
  double murk_theme_cos = 0.5;    // cosine between murk vector and theme
  double unlisted_listed_cos = 0.4;
  double max_pairwise_cos = 0.7;  // separation bound for all center pairs
  int n_humans = 4;
  int jitter_frames = 3;
  double fps = 5.0;

  int n_clusters() const { return n_relevant + n_listed + n_unlisted; }
};

struct SynthOutput {
  std::vector<FrameRecord> murky;
  std::vector<FrameRecord> clean;  // the "enhanced" twin
  QuerySet queries;
  LabelMap labels;
  std::vector<HumanSampleSet> humans;
  Vector murk_vector;
  std::vector<int> schedule;       // per-frame cluster id
  std::vector<Vector> centers;
};

// (1-m)*embedding + m*murk_vector. Errors when m >= 1.
Vector apply_murk(const Vector& embedding, const Vector& murk_vector, double m);

// Deterministic in spec.seed; all emitted embeddings are f32-representable so
// stream files round-trip exactly.
SynthOutput generate_stream(const SynthSpec& spec);

// K frames at evenly spaced indices: floor(i*N/K).
std::vector<FrameIndex> baseline_uniform(std::uint64_t n_frames, int capacity);

}  // namespace merlion
