#include "merlion/synth.hpp"

#include "merlion/vector_ops.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace merlion {

namespace {

// mt19937_64 with hand-rolled derivations so generated files depend only on
// the engine's portable bit stream, not on library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform();
    while (u == 0.0) u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * v);
  }

  // Inclusive on both ends.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

Vector gaussian_vector(Rng& rng, int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.gaussian();
  return v;
}

// Quantize to the f32 grid so values survive the stream file round trip.
Vector to_f32_grid(const Vector& v) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = static_cast<double>(static_cast<float>(v[i]));
  return out;
}

Vector sample_center(Rng& rng, const SynthSpec& spec, const std::vector<Vector>& existing,
                     double theme_weight, const Vector& theme, const Vector* anchor,
                     double anchor_weight, double theme_cap) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    Vector v = gaussian_vector(rng, spec.dim).normalized();
    Vector cand = theme_weight * theme + (1.0 - theme_weight - anchor_weight) * v;
    if (anchor != nullptr) cand += anchor_weight * *anchor;
    cand.normalize();
    if (std::abs(cand.dot(theme)) > theme_cap) continue;
    bool ok = true;
    for (const Vector& c : existing) {
      if (std::abs(cand.dot(c)) > spec.max_pairwise_cos) {
        ok = false;
        break;
      }
    }
    if (ok) return cand;
  }
  throw std::runtime_error("infeasible center separation after bounded retries");
}

}  // namespace

Vector apply_murk(const Vector& embedding, const Vector& murk_vector, double m) {
  if (m >= 1.0 || m < 0.0) throw std::invalid_argument("murk_level must be in [0,1)");
  if (embedding.size() != murk_vector.size()) throw std::invalid_argument("dimension mismatch");
  return (1.0 - m) * embedding + m * murk_vector;
}

SynthOutput generate_stream(const SynthSpec& spec) {
  const int C = spec.n_clusters();
  if (spec.dim < C + 2) throw std::invalid_argument("dim must exceed n_clusters + 1");
  if (spec.n_relevant < 1 || spec.n_listed < 1) {
    throw std::invalid_argument("need at least one relevant and one listed cluster");
  }
  if (spec.murk_level < 0.0 || spec.murk_level >= 1.0) {
    throw std::invalid_argument("murk_level must be in [0,1)");
  }
  if (spec.n_frames < C * 4) throw std::invalid_argument("n_frames too small for the schedule");

  Rng rng(spec.seed);
  SynthOutput out;

  const Vector theme = gaussian_vector(rng, spec.dim).normalized();
  for (int i = 0; i < spec.n_relevant; ++i) {
    out.centers.push_back(
        sample_center(rng, spec, out.centers, spec.theme_weight, theme, nullptr, 0.0, 0.95));
  }
  for (int i = 0; i < spec.n_listed; ++i) {
    out.centers.push_back(sample_center(rng, spec, out.centers, 0.0, theme, nullptr, 0.0, 0.15));
  }
  const Vector& first_listed = out.centers[static_cast<std::size_t>(spec.n_relevant)];
  for (int i = 0; i < spec.n_unlisted; ++i) {
    out.centers.push_back(sample_center(rng, spec, out.centers, 0.0, theme, &first_listed,
                                        spec.unlisted_listed_cos, 0.15));
  }

  // Murk direction: a controlled theme component plus a residual orthogonal to
  // every center, so murk drags all frames toward the positive query without
  // favoring any particular cluster.
  {
    Vector w = gaussian_vector(rng, spec.dim);
    Eigen::MatrixXd basis(spec.dim, C + 1);
    for (int i = 0; i < C; ++i) basis.col(i) = out.centers[static_cast<std::size_t>(i)];
    basis.col(C) = theme;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(spec.dim, C + 1);
    w -= q * (q.transpose() * w);
    w.normalize();
    Vector murk = spec.murk_theme_cos * theme +
                  std::sqrt(1.0 - spec.murk_theme_cos * spec.murk_theme_cos) * w;
    out.murk_vector = to_f32_grid(murk.normalized());
  }

  // Transect schedule: every cluster appears as one contiguous segment, in
  // shuffled order, with dwell lengths summing exactly to n_frames.
  std::vector<int> order(static_cast<std::size_t>(C));
  for (int i = 0; i < C; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  const std::int64_t base = spec.n_frames / C;
  std::vector<std::int64_t> dwells;
  std::int64_t total = 0;
  for (int i = 0; i < C; ++i) {
    const std::int64_t d = base + rng.uniform_int(-base / 4, base / 4);
    dwells.push_back(d);
    total += d;
  }
  for (std::size_t i = 0; i < dwells.size(); ++i) {
    dwells[i] = std::max<std::int64_t>(
        4, std::llround(static_cast<double>(dwells[i]) * static_cast<double>(spec.n_frames) /
                        static_cast<double>(total)));
  }
  auto sum_dwells = [&] {
    std::int64_t s = 0;
    for (std::int64_t d : dwells) s += d;
    return s;
  };
  while (sum_dwells() > spec.n_frames) {
    *std::max_element(dwells.begin(), dwells.end()) -= 1;
  }
  while (sum_dwells() < spec.n_frames) {
    *std::min_element(dwells.begin(), dwells.end()) += 1;
  }
  for (int i = 0; i < C; ++i) {
    for (std::int64_t k = 0; k < dwells[static_cast<std::size_t>(i)]; ++k) {
      out.schedule.push_back(order[static_cast<std::size_t>(i)]);
    }
  }

  const double m = spec.murk_level;
  for (int t = 0; t < spec.n_frames; ++t) {
    const int cluster = out.schedule[static_cast<std::size_t>(t)];
    Vector e = out.centers[static_cast<std::size_t>(cluster)] +
               spec.noise_sigma * gaussian_vector(rng, spec.dim);
    e.normalize();
    const Vector clean = to_f32_grid(e);
    const Vector murky = to_f32_grid(apply_murk(clean, out.murk_vector, m));
    const double ts = static_cast<double>(t) / spec.fps;
    const FrameIndex idx = static_cast<FrameIndex>(t);
    out.clean.push_back({idx, ts, clean, {}});
    out.murky.push_back({idx, ts, murky, {}});
    out.labels[idx] = {"cluster" + std::to_string(cluster)};
  }

  {
    Vector qpos = Vector::Zero(spec.dim);
    for (int i = 0; i < spec.n_relevant; ++i) qpos += out.centers[static_cast<std::size_t>(i)];
    out.queries.positive = to_f32_grid(qpos.normalized());
    for (int i = 0; i < spec.n_listed; ++i) {
      out.queries.negatives.push_back(
          to_f32_grid(out.centers[static_cast<std::size_t>(spec.n_relevant + i)]));
    }
  }

  // Synthetic evaluators: jittered picks around each relevant cluster's
  // archetype (the frame closest in cosine to its center), round-robin until
  // six frames are chosen, mirroring the paper's six-frame selection task.
  std::vector<std::vector<int>> cluster_frames(static_cast<std::size_t>(C));
  for (int t = 0; t < spec.n_frames; ++t) {
    cluster_frames[static_cast<std::size_t>(out.schedule[static_cast<std::size_t>(t)])].push_back(t);
  }
  std::vector<int> archetype(static_cast<std::size_t>(spec.n_relevant), 0);
  for (int c = 0; c < spec.n_relevant; ++c) {
    double best = -2.0;
    for (int t : cluster_frames[static_cast<std::size_t>(c)]) {
      const double cs = cosine_similarity(out.clean[static_cast<std::size_t>(t)].embedding,
                                          out.centers[static_cast<std::size_t>(c)]);
      if (cs > best) {
        best = cs;
        archetype[static_cast<std::size_t>(c)] = t;
      }
    }
  }
  constexpr int kPicks = 6;
  for (int h = 0; h < spec.n_humans; ++h) {
    HumanSampleSet human;
    human.evaluator_id = "h" + std::to_string(h);
    std::vector<FrameIndex> picks;
    std::set<int> used;  // evaluators pick distinct frames
    auto nearest_unused = [&](const std::vector<int>& pool, std::int64_t target) {
      int best = -1;
      for (int t : pool) {
        if (used.count(t)) continue;
        if (best < 0 || std::llabs(t - target) < std::llabs(best - target)) best = t;
      }
      return best;
    };
    for (int i = 0; i < kPicks; ++i) {
      const int c = i % spec.n_relevant;
      const std::int64_t target = archetype[static_cast<std::size_t>(c)] +
                                  rng.uniform_int(-spec.jitter_frames, spec.jitter_frames);
      int nearest = nearest_unused(cluster_frames[static_cast<std::size_t>(c)], target);
      if (nearest < 0) {
        // designated cluster exhausted: fall back to any unused relevant frame
        for (int rc = 0; rc < spec.n_relevant; ++rc) {
          const int alt = nearest_unused(cluster_frames[static_cast<std::size_t>(rc)], target);
          if (alt >= 0 &&
              (nearest < 0 || std::llabs(alt - target) < std::llabs(nearest - target))) {
            nearest = alt;
          }
        }
      }
      if (nearest < 0) break;  // fewer relevant frames than the selection budget
      used.insert(nearest);
      picks.push_back(static_cast<FrameIndex>(nearest));
    }
    std::sort(picks.begin(), picks.end());
    human.frame_indices = std::move(picks);
    out.humans.push_back(std::move(human));
  }
  return out;
}

std::vector<FrameIndex> baseline_uniform(std::uint64_t n_frames, int capacity) {
  if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  std::vector<FrameIndex> out;
  if (n_frames == 0) return out;
  const std::uint64_t k = std::min<std::uint64_t>(static_cast<std::uint64_t>(capacity), n_frames);
  for (std::uint64_t i = 0; i < k; ++i) out.push_back(i * n_frames / k);
  return out;
}

}  // namespace merlion
