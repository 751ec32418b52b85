/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>

#include "xannot/graph.hpp"

namespace xannot {

/// Points at which a test harness may interrupt a write to simulate a crash.
enum class FaultPoint {
  /// Mutation records of a commit are on disk, the commit marker is not.
  before_commit_marker,
  /// Compacted image is written and synced under its temporary name.
  before_compaction_rename,
};

struct StoreOptions {
  /// Empty path keeps the store purely in memory.
  std::filesystem::path path;
  /// Compact after this many appended commits; 0 disables periodic compaction.
  std::size_t compact_after = 256;
  /// Throwing from the hook aborts the write at that point.
  std::function<void(FaultPoint)> fault_hook;
};

/// Durable single-writer store for the entity graph.
///
/// On disk the store is one append-structured file. Each line is
/// `<crc32 hex> <json>`; a commit is its mutation lines followed by a commit
/// marker line. Lines after the last marker are a torn write and are dropped
/// on open. Compaction writes the current graph to `<path>.tmp` and renames it
/// over the store file. A `<path>.lock` file holds an exclusive flock while
/// the store is open.
class Store {
 public:
  explicit Store(StoreOptions options = {});
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// Latest committed state. The pointer stays valid after later commits.
  std::shared_ptr<const Graph> snapshot() const;
  std::uint64_t version() const;

  /// Applies `tx` atomically. Throws Error{IntegrityViolation} (details hold
  /// the report) if the resulting graph is not fully integral, Error{IoFailure}
  /// if the append fails. On any throw the state is unchanged.
  std::uint64_t commit(const Transaction& tx);

  /// Builds a transaction against the latest state while holding the writer
  /// lock, then commits it. An empty transaction commits nothing.
  std::uint64_t update(const std::function<void(const Graph&, Transaction&)>& build);

  IntegrityReport check_integrity() const;

  void compact();

  const std::filesystem::path& path() const { return options_.path; }
  bool persistent() const { return !options_.path.empty(); }

 private:
  class File;

  void open_file();
  void replay(std::istream& in);
  std::uint64_t commit_locked(const Transaction& tx);
  void append(const Transaction& tx, std::uint64_t version);
  void compact_locked();

  StoreOptions options_;
  mutable std::mutex write_mutex_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Graph> current_;
  std::unique_ptr<File> log_;
  std::unique_ptr<File> lock_;
  std::size_t appended_since_compaction_ = 0;
  bool crashed_ = false;
};

}  // namespace xannot
