#include "merlion/pipeline.hpp"

#include "merlion/gate.hpp"
#include "merlion/log.hpp"
#include "merlion/vector_ops.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace merlion {

namespace {

void require_dim(const FrameRecord& frame, Eigen::Index dim) {
  if (frame.embedding.size() != dim) {
    throw std::runtime_error("frame " + std::to_string(frame.frame_index) +
                             ": dimension mismatch (got " + std::to_string(frame.embedding.size()) +
                             ", stream so far " + std::to_string(dim) + ")");
  }
}

// Offers the candidate to the sampler and folds the outcome into the record.
void offer(const Candidate& candidate, SampleSet& set, const SamplerConfig& config,
           PipelineStats& stats, DecisionRecord& record) {
  const SamplerDecision d = observe(candidate, set, config);
  record.action = d.action;
  record.alpha = d.alpha;
  record.gamma = d.gamma;
  record.trimmed = d.trimmed;
  if (d.action == SamplerDecision::Action::accepted) ++stats.accepted;
  stats.trims += d.trimmed.size();
}

}  // namespace

RunResult run_merlion(FrameSource& stream, const QuerySet& queries, const SamplerConfig& config) {
  RunResult result{SampleSet(config.capacity), {}, {}};
  const Eigen::Index dim = queries.positive.size();
  while (auto frame = stream.next()) {
    require_dim(*frame, dim);
    ++result.stats.frames_seen;
    DecisionRecord record;
    record.frame_index = frame->frame_index;
    record.timestamp = frame->timestamp;

    if (config.seed_policy == SeedPolicy::raw_index &&
        result.stats.frames_seen <= static_cast<std::uint64_t>(config.capacity)) {
      // Literal "t <= K" reading: the first K raw frames bypass the gate.
      Candidate c{frame->frame_index, frame->timestamp, frame->embedding,
                  sampler_transform(frame->embedding, config.transform), false};
      offer(c, result.set, config, result.stats, record);
      result.decisions.push_back(std::move(record));
      continue;
    }

    const GateScore score = gate_score(frame->embedding, queries, config.softmax_scale);
    record.gate_score = score.value;
    if (passes_gate(score, config.tau_ss)) {
      ++result.stats.gate_passed;
      Candidate c{frame->frame_index, frame->timestamp, frame->embedding,
                  sampler_transform(frame->embedding, config.transform), false};
      offer(c, result.set, config, result.stats, record);
    } else {
      record.action = SamplerDecision::Action::rejected_gate;
    }
    result.decisions.push_back(std::move(record));
  }
  return result;
}

RunResult run_surprise_only(FrameSource& stream, const SamplerConfig& config) {
  RunResult result{SampleSet(config.capacity), {}, {}};
  Eigen::Index dim = -1;
  while (auto frame = stream.next()) {
    if (dim < 0) dim = frame->embedding.size();
    require_dim(*frame, dim);
    ++result.stats.frames_seen;
    DecisionRecord record;
    record.frame_index = frame->frame_index;
    record.timestamp = frame->timestamp;
    Candidate c{frame->frame_index, frame->timestamp, frame->embedding,
                sampler_transform(frame->embedding, config.transform), false};
    offer(c, result.set, config, result.stats, record);
    result.decisions.push_back(std::move(record));
  }
  // Gate bypassed: every frame reached the sampler.
  result.stats.gate_passed = result.stats.frames_seen;
  return result;
}

RunResult run_merlion_e(FrameSource& stream, const QuerySet& queries, const SamplerConfig& config,
                        Enhancer& enhancer, FailurePolicy on_failure) {
  RunResult result{SampleSet(config.capacity), {}, {}};
  const Eigen::Index dim = queries.positive.size();
  while (auto frame = stream.next()) {
    require_dim(*frame, dim);
    ++result.stats.frames_seen;
    DecisionRecord record;
    record.frame_index = frame->frame_index;
    record.timestamp = frame->timestamp;

    if (config.seed_policy == SeedPolicy::raw_index &&
        result.stats.frames_seen <= static_cast<std::uint64_t>(config.capacity)) {
      Candidate c{frame->frame_index, frame->timestamp, frame->embedding,
                  sampler_transform(frame->embedding, config.transform), false};
      offer(c, result.set, config, result.stats, record);
      result.decisions.push_back(std::move(record));
      continue;
    }

    const GateScore score = gate_score(frame->embedding, queries, config.softmax_scale);
    record.gate_score = score.value;
    if (!passes_gate(score, config.tau_ss)) {
      record.action = SamplerDecision::Action::rejected_gate;
      result.decisions.push_back(std::move(record));
      continue;
    }
    ++result.stats.gate_passed;

    // SES contract: every gate-passing frame is enhanced, nothing else is.
    ++result.stats.enhancement_calls;
    std::optional<Vector> enhanced = enhancer.enhance(*frame);
    if (!enhanced) {
      if (on_failure == FailurePolicy::abort_run) {
        throw std::runtime_error("enhancer '" + enhancer.name() + "' failed on frame " +
                                 std::to_string(frame->frame_index));
      }
      log::warn("enhancer '" + enhancer.name() + "' failed on frame " +
                std::to_string(frame->frame_index) + "; skipping");
      record.action = SamplerDecision::Action::rejected_post_enhancement;
      result.decisions.push_back(std::move(record));
      continue;
    }
    if (enhanced->size() != dim) {
      throw std::runtime_error("enhancer '" + enhancer.name() + "' returned wrong dim on frame " +
                               std::to_string(frame->frame_index));
    }

    const GateScore ses = gate_score(*enhanced, queries, config.softmax_scale);
    record.ses_score = ses.value;
    const bool ses_ok = passes_gate(ses, config.tau_ses);
    const bool seeding = result.set.offered() < result.set.capacity();
    if (seeding) {
      // Seed-fill membership is decided by the tau_ss gate alone; the SES test
      // only picks which embedding the seed entry carries.
      const Vector& emb = ses_ok ? *enhanced : frame->embedding;
      record.enhanced = ses_ok;
      Candidate c{frame->frame_index, frame->timestamp, emb,
                  sampler_transform(emb, config.transform), ses_ok};
      offer(c, result.set, config, result.stats, record);
    } else if (ses_ok) {
      record.enhanced = true;
      Candidate c{frame->frame_index, frame->timestamp, *enhanced,
                  sampler_transform(*enhanced, config.transform), true};
      offer(c, result.set, config, result.stats, record);
    } else {
      ++result.stats.ses_rejections;
      record.action = SamplerDecision::Action::rejected_post_enhancement;
    }
    result.decisions.push_back(std::move(record));
  }
  return result;
}

}  // namespace merlion
