#pragma once

#include "merlion/pipeline.hpp"
#include "merlion/srum.hpp"
#include "merlion/types.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace merlion {

// Parse failure with the byte offset at which the file stopped making sense.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::uint64_t offset, const std::string& what);
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// Binary embedding stream: 16-byte header (magic "MEF1", version u16 LE,
// dim u16 LE, 8 reserved bytes), then records of frame_index u64 LE,
// timestamp f64 LE, dim x f32 LE.
class StreamReader {
 public:
  explicit StreamReader(const std::string& path);
  std::uint16_t dim() const { return dim_; }
  std::optional<FrameRecord> next();  // lazy; one record of memory

 private:
  std::string path_;
  std::ifstream in_;
  std::uint16_t dim_ = 0;
  std::uint64_t offset_ = 0;
  bool have_last_ = false;
  std::uint64_t last_index_ = 0;
};

class StreamWriter {
 public:
  StreamWriter(const std::string& path, std::uint16_t dim);
  void write(const FrameRecord& record);  // embeddings stored as f32
  void close();

 private:
  std::string path_;
  std::ofstream out_;
  std::uint16_t dim_;
  bool have_last_ = false;
  std::uint64_t last_index_ = 0;
};

std::vector<FrameRecord> read_stream(const std::string& path);
void write_stream(const std::vector<FrameRecord>& records, const std::string& path);

// File-backed FrameSource for constant-memory pipeline runs.
class FileSource final : public FrameSource {
 public:
  explicit FileSource(const std::string& path) : reader_(path) {}
  std::optional<FrameRecord> next() override { return reader_.next(); }

 private:
  StreamReader reader_;
};

// Queries ride in a stream file whose first record is the positive query.
QuerySet read_queries(const std::string& path);
void write_queries(const QuerySet& queries, const std::string& path);

// Line-delimited JSON sidecars.
LabelMap read_labels(const std::string& path);
void write_labels(const LabelMap& labels, const std::string& path);
std::vector<HumanSampleSet> read_humans(const std::string& path);
void write_humans(const std::vector<HumanSampleSet>& humans, const std::string& path);
std::vector<DecisionRecord> read_decision_log(const std::string& path);
void write_decision_log(const std::vector<DecisionRecord>& decisions, const std::string& path);

// Summary: one frame index per line. Stats: key=value lines.
std::vector<FrameIndex> read_summary(const std::string& path);
void write_summary(const std::vector<FrameIndex>& indices, const std::string& path);
void write_stats(const PipelineStats& stats, const std::string& path);

}  // namespace merlion
