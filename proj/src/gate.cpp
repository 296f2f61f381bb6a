#include "merlion/gate.hpp"

#include "merlion/vector_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace merlion {

GateScore gate_score(const Vector& frame_embedding, const QuerySet& queries, double scale) {
  if (queries.negatives.empty()) throw std::invalid_argument("query set requires at least one negative");
  if (scale <= 0.0) throw std::invalid_argument("softmax scale must be positive");

  GateScore score;
  score.per_query_cosines.reserve(1 + queries.negatives.size());
  score.per_query_cosines.push_back(cosine_similarity(frame_embedding, queries.positive));
  for (const Vector& q : queries.negatives) {
    score.per_query_cosines.push_back(cosine_similarity(frame_embedding, q));
  }
  score.positive_cosine = score.per_query_cosines.front();

  const double top = *std::max_element(score.per_query_cosines.begin(), score.per_query_cosines.end());
  double denom = 0.0;
  score.probabilities.reserve(score.per_query_cosines.size());
  for (double c : score.per_query_cosines) {
    score.probabilities.push_back(std::exp(scale * (c - top)));
    denom += score.probabilities.back();
  }
  for (double& p : score.probabilities) p /= denom;
  score.value = 100.0 * score.probabilities.front();
  return score;
}

bool passes_gate(const GateScore& score, double tau) { return score.value > tau; }

}  // namespace merlion
