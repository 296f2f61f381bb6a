#include "merlion/reference.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace merlion::reference {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("degenerate embedding: zero norm");
  return dot(a, b) / (na * nb);
}

double dist(const std::vector<double>& a, const std::vector<double>& b, const std::string& metric) {
  if (metric == "euclidean") {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  }
  if (metric == "cosine") return 1.0 - cosine(a, b);
  if (metric == "l1") {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  }
  throw std::invalid_argument("unknown metric: " + metric);
}

std::vector<double> transform(const std::vector<double>& v, const std::string& kind) {
  std::vector<double> a(v.size());
  double l1 = 0.0;
  double l2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    a[i] = std::abs(v[i]);
    l1 += a[i];
    l2 += v[i] * v[i];
  }
  const double denom = kind == "l1" ? l1 : (kind == "l2" ? std::sqrt(l2) : -1.0);
  if (denom < 0.0) throw std::invalid_argument("unknown transform: " + kind);
  if (denom == 0.0) throw std::invalid_argument("degenerate embedding: zero norm");
  for (double& x : a) x /= denom;
  return a;
}

double gate(const std::vector<double>& emb, const std::vector<std::vector<double>>& queries,
            double scale) {
  std::vector<double> cs;
  cs.reserve(queries.size());
  for (const auto& q : queries) cs.push_back(cosine(emb, q));
  double top = cs[0];
  for (double c : cs) top = std::max(top, c);
  double denom = 0.0;
  for (double c : cs) denom += std::exp(scale * (c - top));
  return 100.0 * std::exp(scale * (cs[0] - top)) / denom;
}

struct Entry {
  std::uint64_t frame_index;
  std::vector<double> feature;
};

// Mean nearest-neighbor distance, optionally pretending position skip is gone.
double mean_nn(const std::vector<Entry>& entries, const std::string& metric,
               std::size_t skip = std::numeric_limits<std::size_t>::max()) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == skip) continue;
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (j == i || j == skip) continue;
      nn = std::min(nn, dist(entries[i].feature, entries[j].feature, metric));
    }
    sum += nn;
    ++count;
  }
  return sum / static_cast<double>(count);
}

}  // namespace

RefResult run(const std::vector<RefFrame>& frames, const std::vector<std::vector<double>>& queries,
              const RefConfig& config,
              const std::vector<std::optional<std::vector<double>>>* enhanced) {
  if (config.gate_enabled && queries.size() < 2) {
    throw std::invalid_argument("gated run requires a positive and at least one negative query");
  }
  if (enhanced != nullptr && enhanced->size() != frames.size()) {
    throw std::invalid_argument("enhanced replay must cover every frame");
  }

  RefResult result;
  std::vector<Entry> entries;
  std::int64_t offered = 0;
  const auto k = static_cast<std::size_t>(config.capacity);

  auto offer = [&](const RefFrame& frame, const std::vector<double>& emb, RefDecision& d) {
    const bool seeding = offered < config.capacity;
    ++offered;
    if (seeding) {
      entries.push_back({frame.frame_index, transform(emb, config.transform)});
      d.action = "seed_fill";
      return;
    }
    const std::vector<double> feature = transform(emb, config.transform);
    double alpha = std::numeric_limits<double>::infinity();
    for (const Entry& e : entries) alpha = std::min(alpha, dist(feature, e.feature, config.metric));
    d.alpha = alpha;
    const double bar = entries.size() < 2 ? 0.0 : mean_nn(entries, config.metric);
    d.gamma = bar;
    if (alpha > bar) {
      d.action = "accepted";
      entries.push_back({frame.frame_index, feature});
      while (entries.size() > k) {
        std::size_t best_pos = 0;
        double best_gamma = -std::numeric_limits<double>::infinity();
        if (entries.size() >= 3) {
          for (std::size_t skip = 0; skip < entries.size(); ++skip) {
            const double g = mean_nn(entries, config.metric, skip);
            if (g > best_gamma) {
              best_gamma = g;
              best_pos = skip;
            }
          }
        }
        d.trimmed.push_back(entries[best_pos].frame_index);
        entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(best_pos));
      }
    } else {
      d.action = "rejected_surprise";
    }
  };

  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RefFrame& frame = frames[i];
    RefDecision d;
    d.frame_index = frame.frame_index;

    if (config.seed_policy == "raw_index" && i < k) {
      offer(frame, frame.embedding, d);
      result.decisions.push_back(std::move(d));
      continue;
    }

    if (config.gate_enabled) {
      const double score = gate(frame.embedding, queries, config.softmax_scale);
      d.gate_score = score;
      if (!(score > config.tau_ss)) {
        d.action = "rejected_gate";
        result.decisions.push_back(std::move(d));
        continue;
      }
    }

    if (enhanced == nullptr) {
      offer(frame, frame.embedding, d);
    } else {
      const std::optional<std::vector<double>>& repl = (*enhanced)[i];
      if (!repl) {
        d.action = "rejected_post_enhancement";
        result.decisions.push_back(std::move(d));
        continue;
      }
      const double ses = gate(*repl, queries, config.softmax_scale);
      d.ses_score = ses;
      const bool ses_ok = ses > config.tau_ses;
      if (offered < config.capacity) {
        offer(frame, ses_ok ? *repl : frame.embedding, d);
      } else if (ses_ok) {
        offer(frame, *repl, d);
      } else {
        d.action = "rejected_post_enhancement";
      }
    }
    result.decisions.push_back(std::move(d));
  }

  for (const Entry& e : entries) result.final_indices.push_back(e.frame_index);
  return result;
}

}  // namespace merlion::reference
