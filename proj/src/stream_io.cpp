#include "merlion/stream_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "stream format helpers assume a little-endian host");

namespace merlion {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr char kMagic[4] = {'M', 'E', 'F', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 16;

std::string positioned(const std::string& path, std::uint64_t offset, const std::string& what) {
  return path + ": byte " + std::to_string(offset) + ": " + what;
}

}  // namespace

ParseError::ParseError(const std::string& path, std::uint64_t offset, const std::string& what)
    : std::runtime_error(positioned(path, offset, what)), offset_(offset) {}

StreamReader::StreamReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw ParseError(path_, 0, "cannot open file");
  char header[kHeaderSize];
  in_.read(header, kHeaderSize);
  if (in_.gcount() != static_cast<std::streamsize>(kHeaderSize)) {
    throw ParseError(path_, static_cast<std::uint64_t>(in_.gcount()), "truncated header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) throw ParseError(path_, 0, "bad magic, expected MEF1");
  std::uint16_t version = 0;
  std::memcpy(&version, header + 4, 2);
  if (version != kVersion) {
    throw ParseError(path_, 4, "unsupported version " + std::to_string(version));
  }
  std::memcpy(&dim_, header + 6, 2);
  if (dim_ == 0) throw ParseError(path_, 6, "dim must be positive");
  offset_ = kHeaderSize;
}

std::optional<FrameRecord> StreamReader::next() {
  const std::size_t record_size = 8 + 8 + 4 * static_cast<std::size_t>(dim_);
  std::vector<char> buf(record_size);
  in_.read(buf.data(), static_cast<std::streamsize>(record_size));
  const std::streamsize got = in_.gcount();
  if (got == 0) return std::nullopt;
  if (got != static_cast<std::streamsize>(record_size)) {
    throw ParseError(path_, offset_, "truncated record (" + std::to_string(got) + " of " +
                                         std::to_string(record_size) + " bytes)");
  }
  FrameRecord record;
  std::memcpy(&record.frame_index, buf.data(), 8);
  std::memcpy(&record.timestamp, buf.data() + 8, 8);
  if (have_last_ && record.frame_index <= last_index_) {
    throw ParseError(path_, offset_, "non-monotone frame_index " + std::to_string(record.frame_index));
  }
  have_last_ = true;
  last_index_ = record.frame_index;
  record.embedding.resize(dim_);
  for (std::uint16_t i = 0; i < dim_; ++i) {
    float f = 0.0f;
    std::memcpy(&f, buf.data() + 16 + 4 * static_cast<std::size_t>(i), 4);
    record.embedding[i] = static_cast<double>(f);
  }
  offset_ += record_size;
  return record;
}

StreamWriter::StreamWriter(const std::string& path, std::uint16_t dim)
    : path_(path), out_(path, std::ios::binary), dim_(dim) {
  if (!out_) throw std::runtime_error(path + ": cannot open for writing");
  if (dim == 0) throw std::invalid_argument("dim must be positive");
  char header[kHeaderSize] = {};
  std::memcpy(header, kMagic, 4);
  std::memcpy(header + 4, &kVersion, 2);
  std::memcpy(header + 6, &dim_, 2);
  out_.write(header, kHeaderSize);
}

void StreamWriter::write(const FrameRecord& record) {
  if (record.embedding.size() != static_cast<Eigen::Index>(dim_)) {
    throw std::invalid_argument(path_ + ": inconsistent dim " + std::to_string(record.embedding.size()));
  }
  if (have_last_ && record.frame_index <= last_index_) {
    throw std::invalid_argument(path_ + ": non-monotone frame_index " +
                                std::to_string(record.frame_index));
  }
  have_last_ = true;
  last_index_ = record.frame_index;
  std::vector<char> buf(16 + 4 * static_cast<std::size_t>(dim_));
  std::memcpy(buf.data(), &record.frame_index, 8);
  std::memcpy(buf.data() + 8, &record.timestamp, 8);
  for (std::uint16_t i = 0; i < dim_; ++i) {
    const float f = static_cast<float>(record.embedding[i]);
    std::memcpy(buf.data() + 16 + 4 * static_cast<std::size_t>(i), &f, 4);
  }
  out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void StreamWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error(path_ + ": write failed");
}

std::vector<FrameRecord> read_stream(const std::string& path) {
  StreamReader reader(path);
  std::vector<FrameRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

void write_stream(const std::vector<FrameRecord>& records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument(path + ": refusing to write empty stream without dim");
  StreamWriter writer(path, static_cast<std::uint16_t>(records.front().embedding.size()));
  for (const FrameRecord& r : records) writer.write(r);
  writer.close();
}

QuerySet read_queries(const std::string& path) {
  const std::vector<FrameRecord> records = read_stream(path);
  if (records.size() < 2) {
    throw ParseError(path, kHeaderSize, "query file needs a positive and at least one negative");
  }
  QuerySet q;
  q.positive = records.front().embedding;
  for (std::size_t i = 1; i < records.size(); ++i) q.negatives.push_back(records[i].embedding);
  return q;
}

void write_queries(const QuerySet& queries, const std::string& path) {
  std::vector<FrameRecord> records;
  records.push_back({0, 0.0, queries.positive, {}});
  FrameIndex idx = 1;
  for (const Vector& n : queries.negatives) records.push_back({idx++, 0.0, n, {}});
  write_stream(records, path);
}

namespace {

std::vector<ordered_json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<ordered_json> lines;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      lines.push_back(ordered_json::parse(line));
    } catch (const ordered_json::parse_error& e) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lines;
}

void write_lines(const std::vector<ordered_json>& lines, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (const ordered_json& j : lines) out << j.dump() << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace

LabelMap read_labels(const std::string& path) {
  LabelMap map;
  for (const ordered_json& j : read_jsonl(path)) {
    std::set<std::string> labels;
    for (const auto& l : j.at("labels")) labels.insert(l.get<std::string>());
    map[j.at("frame_index").get<FrameIndex>()] = std::move(labels);
  }
  return map;
}

void write_labels(const LabelMap& labels, const std::string& path) {
  std::vector<ordered_json> lines;
  for (const auto& [index, set] : labels) {
    lines.push_back({{"frame_index", index}, {"labels", set}});
  }
  write_lines(lines, path);
}

std::vector<HumanSampleSet> read_humans(const std::string& path) {
  std::vector<HumanSampleSet> out;
  for (const ordered_json& j : read_jsonl(path)) {
    HumanSampleSet h;
    h.evaluator_id = j.at("evaluator_id").get<std::string>();
    for (const auto& f : j.at("frame_indices")) h.frame_indices.push_back(f.get<FrameIndex>());
    out.push_back(std::move(h));
  }
  return out;
}

void write_humans(const std::vector<HumanSampleSet>& humans, const std::string& path) {
  std::vector<ordered_json> lines;
  for (const HumanSampleSet& h : humans) {
    lines.push_back({{"evaluator_id", h.evaluator_id}, {"frame_indices", h.frame_indices}});
  }
  write_lines(lines, path);
}

std::vector<DecisionRecord> read_decision_log(const std::string& path) {
  std::vector<DecisionRecord> out;
  for (const ordered_json& j : read_jsonl(path)) {
    DecisionRecord r;
    r.frame_index = j.at("frame_index").get<FrameIndex>();
    r.timestamp = j.at("timestamp").get<double>();
    r.action = action_from_string(j.at("action").get<std::string>());
    if (j.contains("gate_score")) r.gate_score = j["gate_score"].get<double>();
    if (j.contains("ses_score")) r.ses_score = j["ses_score"].get<double>();
    if (j.contains("alpha")) r.alpha = j["alpha"].get<double>();
    if (j.contains("gamma")) r.gamma = j["gamma"].get<double>();
    if (j.contains("trimmed")) {
      for (const auto& t : j["trimmed"]) r.trimmed.push_back(t.get<FrameIndex>());
    }
    if (j.contains("enhanced")) r.enhanced = j["enhanced"].get<bool>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_decision_log(const std::vector<DecisionRecord>& decisions, const std::string& path) {
  std::vector<ordered_json> lines;
  lines.reserve(decisions.size());
  for (const DecisionRecord& d : decisions) {
    ordered_json j{{"frame_index", d.frame_index}, {"timestamp", d.timestamp}};
    if (d.gate_score) j["gate_score"] = *d.gate_score;
    if (d.ses_score) j["ses_score"] = *d.ses_score;
    j["action"] = to_string(d.action);
    if (d.alpha) j["alpha"] = *d.alpha;
    if (d.gamma) j["gamma"] = *d.gamma;
    if (!d.trimmed.empty()) j["trimmed"] = d.trimmed;
    if (d.enhanced) j["enhanced"] = true;
    lines.push_back(std::move(j));
  }
  write_lines(lines, path);
}

std::vector<FrameIndex> read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<FrameIndex> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(std::stoull(line));
  }
  return out;
}

void write_summary(const std::vector<FrameIndex>& indices, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (FrameIndex i : indices) out << i << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_stats(const PipelineStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "frames_seen=" << stats.frames_seen << "\n"
      << "gate_passed=" << stats.gate_passed << "\n"
      << "enhancement_calls=" << stats.enhancement_calls << "\n"
      << "ses_rejections=" << stats.ses_rejections << "\n"
      << "accepted=" << stats.accepted << "\n"
      << "trims=" << stats.trims << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace merlion
