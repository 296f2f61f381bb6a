#include "merlion/pipeline.hpp"

#include "merlion/stream_io.hpp"
#include "merlion/synth.hpp"

#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

using namespace merlion;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("merlion_pipe_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<FrameRecord> random_frames(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<FrameRecord> frames;
  for (int i = 0; i < n; ++i) {
    Vector v(dim);
    for (int d = 0; d < dim; ++d) v[d] = normal(gen);
    v.normalize();
    frames.push_back({static_cast<FrameIndex>(i), i * 0.2, v});
  }
  return frames;
}

QuerySet axis_queries(int dim) {
  QuerySet q;
  q.positive = Vector::Zero(dim);
  q.positive[0] = 1.0;
  Vector neg = Vector::Zero(dim);
  neg[1] = 1.0;
  q.negatives = {neg};
  return q;
}

// Enhancer that reports the wrong dimensionality; protocol violation.
struct WrongDimEnhancer final : Enhancer {
  std::optional<Vector> enhance(const FrameRecord&) override { return Vector::Zero(2); }
  std::string name() const override { return "wrong-dim"; }
};

}  // namespace

TEST_CASE("a zero gate threshold reduces the pipeline to surprise-only sampling") {
  const auto frames = random_frames(16, 4, 21);
  SamplerConfig config;
  config.capacity = 3;
  config.tau_ss = 0.0;  // softmax scores are strictly positive, so all pass

  MemorySource a(frames), b(frames);
  const RunResult gated = run_merlion(a, axis_queries(4), config);
  const RunResult plain = run_surprise_only(b, config);

  CHECK(gated.set.frame_indices() == plain.set.frame_indices());
  CHECK(gated.stats.gate_passed == gated.stats.frames_seen);
  REQUIRE(gated.decisions.size() == plain.decisions.size());
  for (std::size_t i = 0; i < gated.decisions.size(); ++i) {
    CHECK(gated.decisions[i].action == plain.decisions[i].action);
    CHECK(gated.decisions[i].alpha == plain.decisions[i].alpha);
    CHECK(gated.decisions[i].gamma == plain.decisions[i].gamma);
    CHECK(gated.decisions[i].gate_score.has_value());
    CHECK_FALSE(plain.decisions[i].gate_score.has_value());
  }
}

TEST_CASE("an unreachable tau_ses leaves only the seed-fill entries") {
  const auto frames = random_frames(10, 4, 5);
  SamplerConfig config;
  config.capacity = 3;
  config.tau_ss = 0.0;    // everything reaches enhancement
  config.tau_ses = 100.0;  // scores cap at 100 and the comparison is strict

  IdentityEnhancer identity;
  MemorySource source(frames);
  const RunResult r = run_merlion_e(source, axis_queries(4), config, identity);

  CHECK(r.set.frame_indices() == std::vector<FrameIndex>{0, 1, 2});
  CHECK(r.stats.gate_passed == 10);
  CHECK(r.stats.enhancement_calls == 10);  // every gate-passer, seeds included
  CHECK(r.stats.ses_rejections == 7);      // seed admissions are not rejections
  CHECK(r.stats.accepted == 0);
  CHECK(r.stats.trims == 0);
  for (const SampleEntry& e : r.set.entries()) CHECK_FALSE(e.enhanced);
  for (std::size_t i = 3; i < r.decisions.size(); ++i) {
    CHECK(r.decisions[i].action == SamplerDecision::Action::rejected_post_enhancement);
    CHECK(r.decisions[i].ses_score.has_value());
  }
}

TEST_CASE("identity enhancement with matched thresholds reproduces the plain run") {
  SynthSpec spec;
  spec.seed = 11;
  spec.dim = 16;
  spec.n_frames = 60;
  spec.murk_level = 0.3;
  const SynthOutput synth = generate_stream(spec);

  SamplerConfig config;
  config.tau_ss = 40.0;
  config.tau_ses = 40.0;

  IdentityEnhancer identity;
  MemorySource a(synth.murky), b(synth.murky);
  const RunResult plain = run_merlion(a, synth.queries, config);
  const RunResult e = run_merlion_e(b, synth.queries, config, identity);

  REQUIRE(plain.set.entries().size() == e.set.entries().size());
  for (std::size_t i = 0; i < plain.set.entries().size(); ++i) {
    const SampleEntry& x = plain.set.entries()[i];
    const SampleEntry& y = e.set.entries()[i];
    CHECK(x.frame_index == y.frame_index);
    CHECK(x.timestamp == y.timestamp);
    CHECK(x.raw_embedding == y.raw_embedding);
    CHECK(x.sampler_feature == y.sampler_feature);
  }
  CHECK(plain.stats.frames_seen == e.stats.frames_seen);
  CHECK(plain.stats.gate_passed == e.stats.gate_passed);
  CHECK(plain.stats.accepted == e.stats.accepted);
  CHECK(plain.stats.trims == e.stats.trims);
  CHECK(e.stats.ses_rejections == 0);
  REQUIRE(plain.decisions.size() == e.decisions.size());
  for (std::size_t i = 0; i < plain.decisions.size(); ++i) {
    CHECK(plain.decisions[i].action == e.decisions[i].action);
    CHECK(plain.decisions[i].alpha == e.decisions[i].alpha);
    CHECK(plain.decisions[i].gamma == e.decisions[i].gamma);
    CHECK(plain.decisions[i].trimmed == e.decisions[i].trimmed);
  }
}

TEST_CASE("enhancement failures follow the failure policy") {
  TempDir dir;
  {
    StreamWriter writer(dir.file("empty.mef"), 4);  // header-only aligned stream
    writer.close();
  }
  const auto frames = random_frames(6, 4, 3);
  SamplerConfig config;
  config.capacity = 2;
  config.tau_ss = 0.0;

  SUBCASE("skip_frame records a soft rejection and keeps going") {
    AlignedStreamEnhancer missing(dir.file("empty.mef"));
    MemorySource source(frames);
    const RunResult r = run_merlion_e(source, axis_queries(4), config, missing,
                                      FailurePolicy::skip_frame);
    CHECK(r.set.entries().empty());
    CHECK(r.stats.frames_seen == 6);
    CHECK(r.stats.gate_passed == 6);
    CHECK(r.stats.enhancement_calls == 6);  // attempts count even when they fail
    CHECK(r.stats.ses_rejections == 0);     // failure is not an SES rejection
    for (const DecisionRecord& d : r.decisions) {
      CHECK(d.action == SamplerDecision::Action::rejected_post_enhancement);
      CHECK_FALSE(d.ses_score.has_value());
      CHECK_FALSE(d.enhanced);
    }
  }

  SUBCASE("abort_run raises on the first failure") {
    AlignedStreamEnhancer missing(dir.file("empty.mef"));
    MemorySource source(frames);
    CHECK_THROWS_WITH_AS(
        run_merlion_e(source, axis_queries(4), config, missing, FailurePolicy::abort_run),
        doctest::Contains("failed on frame"), std::runtime_error);
  }

  SUBCASE("an enhancer that changes dimensionality is a hard error") {
    WrongDimEnhancer wrong;
    MemorySource source(frames);
    CHECK_THROWS_WITH_AS(run_merlion_e(source, axis_queries(4), config, wrong),
                         doctest::Contains("wrong dim"), std::runtime_error);
  }
}

TEST_CASE("raw_index seeding admits the first K frames unconditionally") {
  // Frames 0 and 1 sit on the negative query axis and would fail any real gate.
  std::vector<FrameRecord> frames;
  Vector neg = Vector::Zero(4);
  neg[1] = 1.0;
  frames.push_back({0, 0.0, neg});
  Vector neg2 = Vector::Zero(4);
  neg2[1] = 0.9;
  neg2[2] = 0.1;
  frames.push_back({1, 0.2, neg2});
  Vector pos = Vector::Zero(4);
  pos[0] = 1.0;
  frames.push_back({2, 0.4, pos});

  SamplerConfig config;
  config.capacity = 2;
  config.tau_ss = 50.0;
  config.seed_policy = SeedPolicy::raw_index;

  MemorySource source(frames);
  const RunResult r = run_merlion(source, axis_queries(4), config);
  CHECK(r.decisions[0].action == SamplerDecision::Action::seed_fill);
  CHECK(r.decisions[1].action == SamplerDecision::Action::seed_fill);
  CHECK_FALSE(r.decisions[0].gate_score.has_value());
  CHECK_FALSE(r.decisions[1].gate_score.has_value());
  CHECK(r.decisions[2].gate_score.has_value());  // gate re-engages after the prefix

  // Default policy seeds with gate-passers only: the junk frames are rejected.
  MemorySource source2(frames);
  SamplerConfig gated = config;
  gated.seed_policy = SeedPolicy::gated_count;
  const RunResult g = run_merlion(source2, axis_queries(4), gated);
  CHECK(g.decisions[0].action == SamplerDecision::Action::rejected_gate);
  CHECK(g.decisions[1].action == SamplerDecision::Action::rejected_gate);
  CHECK(g.decisions[2].action == SamplerDecision::Action::seed_fill);
}

TEST_CASE("dimension mismatches are hard errors") {
  std::vector<FrameRecord> frames = random_frames(2, 4, 9);
  frames[1].embedding = Vector::Zero(3);
  frames[1].embedding[0] = 1.0;

  SamplerConfig config;
  MemorySource a(frames);
  CHECK_THROWS_WITH_AS(run_merlion(a, axis_queries(4), config),
                       doctest::Contains("dimension mismatch"), std::runtime_error);
  MemorySource b(frames);
  CHECK_THROWS_WITH_AS(run_surprise_only(b, config), doctest::Contains("dimension mismatch"),
                       std::runtime_error);
}

TEST_CASE("run accounting partitions the stream") {
  SynthSpec spec;
  spec.seed = 4;
  spec.dim = 16;
  spec.n_frames = 120;
  spec.murk_level = 0.25;
  const SynthOutput synth = generate_stream(spec);

  SamplerConfig config;
  config.tau_ss = 50.0;
  MemorySource source(synth.murky);
  const RunResult r = run_merlion(source, synth.queries, config);

  CHECK(r.stats.frames_seen == 120);
  CHECK(r.decisions.size() == 120);
  std::uint64_t rejected_gate = 0, accepted = 0, trimmed = 0;
  for (const DecisionRecord& d : r.decisions) {
    if (d.action == SamplerDecision::Action::rejected_gate) ++rejected_gate;
    if (d.action == SamplerDecision::Action::accepted) ++accepted;
    trimmed += d.trimmed.size();
  }
  CHECK(rejected_gate + r.stats.gate_passed == r.stats.frames_seen);
  CHECK(accepted == r.stats.accepted);
  CHECK(trimmed == r.stats.trims);
  CHECK(r.set.entries().size() <= static_cast<std::size_t>(config.capacity));
  const auto indices = r.set.frame_indices();
  for (std::size_t i = 1; i < indices.size(); ++i) CHECK(indices[i - 1] < indices[i]);
}
