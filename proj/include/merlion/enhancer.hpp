#pragma once

#include "merlion/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace merlion {

// Inverts the synthetic murk blend: (e - m*murk) / (1 - m).
Vector mock_demurk(const Vector& embedding, const Vector& murk_vector, double murk_level);

// Enhancement plug-in. enhance returns the enhanced embedding, or nullopt on
// failure (timeout, missing frame, protocol error); the pipeline's failure
// policy decides what happens next.
class Enhancer {
 public:
  virtual ~Enhancer() = default;
  virtual std::optional<Vector> enhance(const FrameRecord& frame) = 0;
  virtual std::string name() const = 0;
};

enum class FailurePolicy { skip_frame, abort_run };

// Pass-through enhancer (kind "none").
class IdentityEnhancer final : public Enhancer {
 public:
  std::optional<Vector> enhance(const FrameRecord& frame) override { return frame.embedding; }
  std::string name() const override { return "identity"; }
};

// Looks up the enhanced embedding in a second, frame-aligned stream.
class AlignedStreamEnhancer final : public Enhancer {
 public:
  explicit AlignedStreamEnhancer(const std::string& stream_path);
  std::optional<Vector> enhance(const FrameRecord& frame) override;
  std::string name() const override { return "aligned"; }

 private:
  std::map<FrameIndex, Vector> by_index_;
};

class MockDemurkEnhancer final : public Enhancer {
 public:
  MockDemurkEnhancer(Vector murk_vector, double murk_level);
  std::optional<Vector> enhance(const FrameRecord& frame) override;
  std::string name() const override { return "demurk"; }

 private:
  Vector murk_vector_;
  double murk_level_;
};

// Runs an external command and speaks the length-prefixed embedding protocol:
// 4-byte little-endian payload length, then dim x 4 bytes of little-endian
// 32-bit floats; response framed identically. One request in flight.
class SubprocessEnhancer final : public Enhancer {
 public:
  explicit SubprocessEnhancer(std::string command, int timeout_ms = 5000);
  ~SubprocessEnhancer() override;
  SubprocessEnhancer(const SubprocessEnhancer&) = delete;
  SubprocessEnhancer& operator=(const SubprocessEnhancer&) = delete;

  std::optional<Vector> enhance(const FrameRecord& frame) override;
  std::string name() const override { return "subprocess"; }

 private:
  void start();
  void stop();

  std::string command_;
  int timeout_ms_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
};

}  // namespace merlion
