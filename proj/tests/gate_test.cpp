#include "merlion/gate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace merlion;

namespace {

// Query with an exact target cosine against the x axis.
Vector query_with_cosine(double c) {
  Vector q(3);
  q << c, std::sqrt(1.0 - c * c), 0.0;
  return q;
}

Vector x_axis() {
  Vector v(3);
  v << 1.0, 0.0, 0.0;
  return v;
}

}  // namespace

TEST_CASE("gate_score frozen three-query case") {
  // cosines 0.30 / 0.25 / 0.20 at scale 100:
  // 100 / (1 + e^-5 + e^-10) = 99.32623568421743...
  QuerySet queries;
  queries.positive = query_with_cosine(0.30);
  queries.negatives = {query_with_cosine(0.25), query_with_cosine(0.20)};
  const GateScore score = gate_score(x_axis(), queries, 100.0);
  CHECK(score.value == doctest::Approx(99.32623568421743580370392).epsilon(1e-9));
  CHECK(score.positive_cosine == doctest::Approx(0.30).epsilon(1e-12));
  REQUIRE(score.per_query_cosines.size() == 3);
  CHECK(score.per_query_cosines[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(score.per_query_cosines[2] == doctest::Approx(0.20).epsilon(1e-12));
}

TEST_CASE("gate_score equidistant queries split the mass") {
  QuerySet queries;
  queries.positive = x_axis();
  queries.negatives = {x_axis()};
  Vector frame(3);
  frame << 0.6, 0.8, 0.0;
  const GateScore score = gate_score(frame, queries, 100.0);
  CHECK(score.value == 50.0);  // exact: equal logits
}

TEST_CASE("gate_score saturates toward 100 on a dominant positive") {
  QuerySet queries;
  queries.positive = x_axis();
  queries.negatives = {-x_axis()};
  const GateScore score = gate_score(x_axis(), queries, 100.0);
  CHECK(score.value == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(score.value <= 100.0);
}

TEST_CASE("gate_score probabilities are a proper softmax") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 64; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 15);
    const int negatives = 1 + static_cast<int>(rng() % 4);
    auto draw = [&] {
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v[i] = unit(rng);
      if (v.norm() == 0.0) v[0] = 1.0;
      return v;
    };
    QuerySet queries;
    queries.positive = draw();
    for (int i = 0; i < negatives; ++i) queries.negatives.push_back(draw());
    const Vector frame = draw();
    const double scale = 1.0 + 99.0 * std::abs(unit(rng));
    const GateScore score = gate_score(frame, queries, scale);

    double sum = 0.0;
    for (double p : score.probabilities) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(score.value == doctest::Approx(100.0 * score.probabilities.front()).epsilon(1e-15));

    // independent high-precision recomputation from the reported cosines
    long double denom = 0.0L;
    for (double c : score.per_query_cosines) {
      denom += std::exp(static_cast<long double>(scale) * static_cast<long double>(c));
    }
    const long double expected =
        100.0L *
        std::exp(static_cast<long double>(scale) * static_cast<long double>(score.positive_cosine)) /
        denom;
    CHECK(score.value == doctest::Approx(static_cast<double>(expected)).epsilon(1e-9));
  }
}

TEST_CASE("passes_gate is strict") {
  QuerySet queries;
  queries.positive = x_axis();
  queries.negatives = {x_axis()};
  Vector frame(3);
  frame << 0.0, 1.0, 0.0;
  const GateScore score = gate_score(frame, queries, 100.0);
  CHECK(score.value == 50.0);
  CHECK_FALSE(passes_gate(score, 50.0));
  CHECK(passes_gate(score, 49.999999));
}

TEST_CASE("gate_score input validation") {
  QuerySet no_negatives;
  no_negatives.positive = x_axis();
  CHECK_THROWS_AS(gate_score(x_axis(), no_negatives, 100.0), std::invalid_argument);

  QuerySet queries;
  queries.positive = x_axis();
  queries.negatives = {x_axis()};
  CHECK_THROWS_AS(gate_score(x_axis(), queries, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gate_score(x_axis(), queries, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(gate_score(Vector::Zero(3), queries, 100.0), std::invalid_argument);
}
