#pragma once

#include "merlion/types.hpp"

#include <vector>

namespace merlion {

// Query-conditioned similarity score. value is 100x the softmax component of
// the positive query over all query cosines, so it lives in (0, 100).
struct GateScore {
  double value = 0.0;
  double positive_cosine = 0.0;
  std::vector<double> per_query_cosines;  // positive first
  std::vector<double> probabilities;      // softmax components, sum to 1
};

// Softmax over s-scaled cosines, computed with max-subtraction.
GateScore gate_score(const Vector& frame_embedding, const QuerySet& queries, double scale);

// Strict threshold test: value > tau.
bool passes_gate(const GateScore& score, double tau);

}  // namespace merlion
