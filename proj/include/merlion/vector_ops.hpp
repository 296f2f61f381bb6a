#pragma once

#include "merlion/types.hpp"

#include <cmath>
#include <stdexcept>

namespace merlion {

namespace detail {

inline void require_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b) throw std::invalid_argument("dimension mismatch");
}

}  // namespace detail

// a.b / (|a||b|); throws on zero-norm input.
template <typename A, typename B>
double cosine_similarity(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  detail::require_same_dim(a.size(), b.size());
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("degenerate embedding: zero norm");
  return a.dot(b) / (na * nb);
}

// Feature-space transform applied before sampling: elementwise absolute value,
// then normalized so the result is scale-free. L1 makes components sum to 1.
template <typename D>
Vector sampler_transform(const Eigen::MatrixBase<D>& v, Transform kind = Transform::l1) {
  Vector a = v.cwiseAbs();
  const double n = (kind == Transform::l1) ? a.sum() : a.norm();
  if (n == 0.0) throw std::invalid_argument("degenerate embedding: all-zero vector");
  a /= n;
  return a;
}

template <typename A, typename B>
double distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, Metric metric) {
  detail::require_same_dim(a.size(), b.size());
  switch (metric) {
    case Metric::euclidean:
      return (a - b).norm();
    case Metric::cosine:
      return 1.0 - cosine_similarity(a, b);
    case Metric::l1:
      return (a - b).cwiseAbs().sum();
  }
  throw std::invalid_argument("unknown metric");
}

}  // namespace merlion
