#include "merlion/enhancer.hpp"

#include "merlion/log.hpp"
#include "merlion/stream_io.hpp"

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace merlion {

Vector mock_demurk(const Vector& embedding, const Vector& murk_vector, double murk_level) {
  if (murk_level >= 1.0) throw std::invalid_argument("murk_level must be < 1");
  if (embedding.size() != murk_vector.size()) throw std::invalid_argument("dimension mismatch");
  if (murk_level == 0.0) return embedding;
  return (embedding - murk_level * murk_vector) / (1.0 - murk_level);
}

AlignedStreamEnhancer::AlignedStreamEnhancer(const std::string& stream_path) {
  StreamReader reader(stream_path);
  while (auto record = reader.next()) {
    by_index_.emplace(record->frame_index, std::move(record->embedding));
  }
}

std::optional<Vector> AlignedStreamEnhancer::enhance(const FrameRecord& frame) {
  auto it = by_index_.find(frame.frame_index);
  if (it == by_index_.end()) {
    log::warn("aligned enhancer: no record for frame " + std::to_string(frame.frame_index));
    return std::nullopt;
  }
  return it->second;
}

MockDemurkEnhancer::MockDemurkEnhancer(Vector murk_vector, double murk_level)
    : murk_vector_(std::move(murk_vector)), murk_level_(murk_level) {
  if (murk_level >= 1.0) throw std::invalid_argument("murk_level must be < 1");
}

std::optional<Vector> MockDemurkEnhancer::enhance(const FrameRecord& frame) {
  return mock_demurk(frame.embedding, murk_vector_, murk_level_);
}

namespace {

// Blocking-with-deadline io helpers for the subprocess protocol.
bool write_all(int fd, const unsigned char* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::write(fd, data, len);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
  return true;
}

bool read_all(int fd, unsigned char* data, std::size_t len, int timeout_ms) {
  while (len > 0) {
    pollfd p{fd, POLLIN, 0};
    const int r = ::poll(&p, 1, timeout_ms);
    if (r <= 0) return false;  // timeout or poll failure
    const ssize_t n = ::read(fd, data, len);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;  // EOF or error
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
  return true;
}

void put_u32_le(unsigned char* out, std::uint32_t v) {
  out[0] = static_cast<unsigned char>(v);
  out[1] = static_cast<unsigned char>(v >> 8);
  out[2] = static_cast<unsigned char>(v >> 16);
  out[3] = static_cast<unsigned char>(v >> 24);
}

std::uint32_t get_u32_le(const unsigned char* in) {
  return static_cast<std::uint32_t>(in[0]) | (static_cast<std::uint32_t>(in[1]) << 8) |
         (static_cast<std::uint32_t>(in[2]) << 16) | (static_cast<std::uint32_t>(in[3]) << 24);
}

}  // namespace

SubprocessEnhancer::SubprocessEnhancer(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {
  ::signal(SIGPIPE, SIG_IGN);
  start();
}

SubprocessEnhancer::~SubprocessEnhancer() { stop(); }

void SubprocessEnhancer::start() {
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
    throw std::runtime_error("enhancer subprocess: pipe failed");
  }
  const int pid = ::fork();
  if (pid < 0) throw std::runtime_error("enhancer subprocess: fork failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

void SubprocessEnhancer::stop() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::optional<Vector> SubprocessEnhancer::enhance(const FrameRecord& frame) {
  if (pid_ < 0) return std::nullopt;
  const std::size_t dim = static_cast<std::size_t>(frame.embedding.size());
  const std::uint32_t payload_len = static_cast<std::uint32_t>(dim * 4);

  std::vector<unsigned char> buf(4 + payload_len);
  put_u32_le(buf.data(), payload_len);
  for (std::size_t i = 0; i < dim; ++i) {
    const float f = static_cast<float>(frame.embedding[static_cast<Eigen::Index>(i)]);
    std::memcpy(buf.data() + 4 + i * 4, &f, 4);
  }
  if (!write_all(to_child_, buf.data(), buf.size())) {
    log::warn("enhancer subprocess: write failed on frame " + std::to_string(frame.frame_index));
    return std::nullopt;
  }

  unsigned char header[4];
  if (!read_all(from_child_, header, 4, timeout_ms_)) {
    log::warn("enhancer subprocess: timeout on frame " + std::to_string(frame.frame_index));
    return std::nullopt;
  }
  const std::uint32_t resp_len = get_u32_le(header);
  if (resp_len != payload_len) {
    log::warn("enhancer subprocess: unexpected response length " + std::to_string(resp_len));
    return std::nullopt;
  }
  std::vector<unsigned char> resp(resp_len);
  if (!read_all(from_child_, resp.data(), resp.size(), timeout_ms_)) {
    log::warn("enhancer subprocess: short response on frame " + std::to_string(frame.frame_index));
    return std::nullopt;
  }
  Vector out(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    float f = 0.0f;
    std::memcpy(&f, resp.data() + i * 4, 4);
    out[static_cast<Eigen::Index>(i)] = static_cast<double>(f);
  }
  return out;
}

}  // namespace merlion
