/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xannot/codec.hpp"
#include "xannot/error.hpp"

namespace xannot {

namespace {

constexpr std::string_view kHeader = "xannot-store 1";
constexpr std::string_view kHeaderPrefix = "xannot-store ";

[[noreturn]] void io_failure(const std::string& what) {
  throw Error(ErrorCode::IoFailure, what + ": " + std::strerror(errno));
}

std::uint32_t checksum(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string record_line(const nlohmann::json& record) {
  const auto body = record.dump();
  char crc[9];
  std::snprintf(crc, sizeof crc, "%08x", checksum(body));
  return std::string(crc) + " " + body + "\n";
}

/// Decodes `<crc> <json>`; nullopt on any damage.
std::optional<nlohmann::json> parse_record(std::string_view line) {
  if (line.size() < 10 || line[8] != ' ') return std::nullopt;
  std::uint32_t expected = 0;
  for (int i = 0; i < 8; ++i) {
    const char c = line[i];
    const int v = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
    if (v < 0) return std::nullopt;
    expected = (expected << 4) | static_cast<std::uint32_t>(v);
  }
  const auto body = line.substr(9);
  if (checksum(body) != expected) return std::nullopt;
  auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("op")) return std::nullopt;
  return parsed;
}

nlohmann::json encode_mutation(const Mutation& mutation) {
  struct Encode {
    nlohmann::json operator()(const PutResource& m) const {
      return {{"op", "put_resource"}, {"resource", codec::to_json(m.resource)}};
    }
    nlohmann::json operator()(const PutSelector& m) const {
      return {{"op", "put_selector"}, {"selector", codec::to_json(m.selector)}, {"pending", m.pending}};
    }
    nlohmann::json operator()(const PutLink& m) const {
      return {{"op", "put_link"}, {"link", codec::to_json(m.link)}};
    }
    nlohmann::json operator()(const DeleteResource& m) const {
      return {{"op", "delete_resource"}, {"id", m.id.str()}};
    }
    nlohmann::json operator()(const DeleteSelector& m) const {
      return {{"op", "delete_selector"}, {"id", m.id.str()}};
    }
    nlohmann::json operator()(const DeleteLink& m) const {
      return {{"op", "delete_link"}, {"id", m.id.str()}};
    }
  };
  return std::visit(Encode{}, mutation);
}

Mutation decode_mutation(const nlohmann::json& record) {
  const auto op = codec::string_member(record, "op");
  if (op == "put_resource") return PutResource{codec::parse_resource(codec::member(record, "resource"))};
  if (op == "put_selector") {
    const auto pending = record.value("pending", false);
    return PutSelector{codec::parse_selector(codec::member(record, "selector")), pending};
  }
  if (op == "put_link") return PutLink{codec::parse_link(codec::member(record, "link"))};
  const auto id = codec::parse_id(codec::member(record, "id"));
  if (op == "delete_resource") return DeleteResource{id};
  if (op == "delete_selector") return DeleteSelector{id};
  if (op == "delete_link") return DeleteLink{id};
  throw Error(ErrorCode::MalformedDocument, "unknown store record op '" + op + "'");
}

nlohmann::json commit_marker(std::uint64_t version) {
  return {{"op", "commit"}, {"version", version}};
}

void sync_directory(const std::filesystem::path& file) {
  auto dir = file.parent_path();
  if (dir.empty()) dir = ".";
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

class Store::File {
 public:
  File(const std::filesystem::path& path, int flags, mode_t mode = 0644)
      : fd_(::open(path.c_str(), flags | O_CLOEXEC, mode)) {
    if (fd_ < 0) io_failure("cannot open " + path.string());
  }
  ~File() {
    if (fd_ >= 0) ::close(fd_);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;

  int fd() const { return fd_; }

  void write_all(std::string_view bytes) {
    while (!bytes.empty()) {
      const auto n = ::write(fd_, bytes.data(), bytes.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        io_failure("write failed");
      }
      bytes.remove_prefix(static_cast<std::size_t>(n));
    }
  }

  void sync() {
    if (::fsync(fd_) != 0) io_failure("fsync failed");
  }

  off_t size() const {
    struct stat st {};
    if (::fstat(fd_, &st) != 0) io_failure("fstat failed");
    return st.st_size;
  }

  void truncate(off_t length) {
    if (::ftruncate(fd_, length) != 0) io_failure("ftruncate failed");
  }

 private:
  int fd_;
};

Store::Store(StoreOptions options) : options_(std::move(options)) {
  current_ = std::make_shared<const Graph>();
  if (persistent()) open_file();
}

Store::~Store() {
  if (!persistent() || crashed_) return;
  std::lock_guard lock(write_mutex_);
  if (appended_since_compaction_ == 0) return;
  try {
    compact_locked();
  } catch (...) {
    // The log is still complete without compaction.
  }
}

void Store::open_file() {
  const auto& path = options_.path;
  auto lock_path = path;
  lock_path += ".lock";
  lock_ = std::make_unique<File>(lock_path, O_RDWR | O_CREAT);
  if (::flock(lock_->fd(), LOCK_EX | LOCK_NB) != 0) {
    throw Error(ErrorCode::StoreLocked, "store " + path.string() + " is held by another process",
                {{"path", path.string()}});
  }

  auto tmp = path;
  tmp += ".tmp";
  std::error_code ignored;
  std::filesystem::remove(tmp, ignored);

  if (!std::filesystem::exists(path)) {
    File fresh(path, O_WRONLY | O_CREAT | O_EXCL);
    fresh.write_all(std::string(kHeader) + "\n");
    fresh.sync();
    sync_directory(path);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_failure("cannot read " + path.string());
    replay(in);
  }
  log_ = std::make_unique<File>(path, O_WRONLY | O_APPEND);
}

void Store::replay(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  const auto header_end = content.find('\n');
  const std::string_view header =
      std::string_view(content).substr(0, header_end == std::string::npos ? content.size() : header_end);
  if (header != kHeader) {
    if (header.starts_with(kHeaderPrefix)) {
      throw Error(ErrorCode::VersionUnsupported, "unsupported store format '" + std::string(header) + "'");
    }
    throw Error(ErrorCode::IoFailure, options_.path.string() + " is not an xannot store");
  }

  Graph graph;
  std::vector<Mutation> pending;
  std::size_t committed_end = header_end + 1;
  std::size_t pos = header_end + 1;
  std::size_t line_no = 1;
  bool damaged = false;
  std::size_t damaged_line = 0;

  while (pos < content.size()) {
    ++line_no;
    const auto nl = content.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const auto line = std::string_view(content).substr(pos, (complete ? nl : content.size()) - pos);
    pos = complete ? nl + 1 : content.size();

    const auto record = complete ? parse_record(line) : std::nullopt;
    if (damaged) {
      // A valid commit after a damaged line means the damage is not a torn tail.
      if (record && record->value("op", "") == "commit") {
        throw Error(ErrorCode::IoFailure, "corrupt record at line " + std::to_string(damaged_line) +
                                              " of " + options_.path.string());
      }
      continue;
    }
    if (!record) {
      damaged = true;
      damaged_line = line_no;
      continue;
    }
    if ((*record)["op"] == "commit") {
      for (const auto& m : pending) {
        try {
          graph.apply(m);
        } catch (const Error& e) {
          // Replay stays lenient so check_integrity can describe hand-edited files.
          if (e.code() != ErrorCode::UnknownEntity) throw;
        }
      }
      pending.clear();
      graph.set_version(record->value("version", graph.version() + 1));
      committed_end = pos;
      continue;
    }
    try {
      pending.push_back(decode_mutation(*record));
    } catch (const Error& e) {
      throw Error(ErrorCode::IoFailure, "undecodable record at line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  if (committed_end < content.size()) {
    File file(options_.path, O_WRONLY);
    file.truncate(static_cast<off_t>(committed_end));
    file.sync();
  }
  current_ = std::make_shared<const Graph>(std::move(graph));
}

std::shared_ptr<const Graph> Store::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

std::uint64_t Store::version() const { return snapshot()->version(); }

std::uint64_t Store::commit(const Transaction& tx) {
  std::lock_guard lock(write_mutex_);
  return commit_locked(tx);
}

std::uint64_t Store::update(const std::function<void(const Graph&, Transaction&)>& build) {
  std::lock_guard lock(write_mutex_);
  Transaction tx;
  build(*snapshot(), tx);
  if (tx.empty()) return version();
  return commit_locked(tx);
}

std::uint64_t Store::commit_locked(const Transaction& tx) {
  if (crashed_) throw Error(ErrorCode::IoFailure, "store was interrupted; reopen it");

  auto next = std::make_shared<Graph>(*snapshot());
  for (const auto& m : tx.mutations) next->apply(m);
  auto report = xannot::check_integrity(*next);
  if (!report.ok) {
    throw Error(ErrorCode::IntegrityViolation, "transaction would break graph integrity", report.to_json());
  }
  const auto version = next->version() + 1;
  next->set_version(version);

  if (persistent()) append(tx, version);

  {
    std::lock_guard lock(snapshot_mutex_);
    current_ = std::move(next);
  }

  if (persistent()) {
    ++appended_since_compaction_;
    if (options_.compact_after > 0 && appended_since_compaction_ >= options_.compact_after) {
      try {
        compact_locked();
      } catch (const Error&) {
        // Retried after the next commit; the log alone is authoritative.
      }
    }
  }
  return version;
}

void Store::append(const Transaction& tx, std::uint64_t version) {
  std::string body;
  for (const auto& m : tx.mutations) body += record_line(encode_mutation(m));
  const auto marker = record_line(commit_marker(version));

  const auto before = log_->size();
  try {
    log_->write_all(body);
    if (options_.fault_hook) {
      try {
        options_.fault_hook(FaultPoint::before_commit_marker);
      } catch (...) {
        crashed_ = true;
        throw;
      }
    }
    log_->write_all(marker);
    log_->sync();
  } catch (const Error&) {
    if (!crashed_) {
      log_->truncate(before);
    }
    throw;
  }
}

void Store::compact() {
  std::lock_guard lock(write_mutex_);
  compact_locked();
}

void Store::compact_locked() {
  if (!persistent()) return;
  if (crashed_) throw Error(ErrorCode::IoFailure, "store was interrupted; reopen it");

  const auto graph = snapshot();
  auto tmp = options_.path;
  tmp += ".tmp";
  {
    File out(tmp, O_WRONLY | O_CREAT | O_TRUNC);
    std::string image = std::string(kHeader) + "\n";
    for (const auto& [id, r] : graph->resources()) image += record_line(encode_mutation(PutResource{r}));
    for (const auto& [id, s] : graph->selectors()) {
      image += record_line(encode_mutation(PutSelector{s, graph->is_pending(id)}));
    }
    for (const auto& [id, l] : graph->links()) image += record_line(encode_mutation(PutLink{l}));
    image += record_line(commit_marker(graph->version()));
    out.write_all(image);
    out.sync();
  }
  if (options_.fault_hook) {
    try {
      options_.fault_hook(FaultPoint::before_compaction_rename);
    } catch (...) {
      crashed_ = true;
      throw;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, options_.path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "rename failed: " + ec.message());
  sync_directory(options_.path);
  log_ = std::make_unique<File>(options_.path, O_WRONLY | O_APPEND);
  appended_since_compaction_ = 0;
}

IntegrityReport Store::check_integrity() const { return xannot::check_integrity(*snapshot()); }

}  // namespace xannot
