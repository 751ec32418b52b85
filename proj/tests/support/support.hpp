/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Fixtures, generators and independent oracles shared by the unit tests and
// the acceptance runner. Oracles here deliberately avoid the library's own
// indices and algorithms: they scan, sort and count from scratch.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xannot/error.hpp"
#include "xannot/graph.hpp"
#include "xannot/interchange.hpp"
#include "xannot/presentation.hpp"
#include "xannot/rsl.hpp"

namespace xannot {
// Readable error names in test failure messages.
inline void PrintTo(ErrorCode code, std::ostream* os) { *os << to_string(code); }
}  // namespace xannot

namespace xannot::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Clock that starts at `start` and advances one millisecond per call.
Clock stepping_clock(std::int64_t start = 1'700'000'000'000);

/// Deterministic ids and timestamps.
LinkServiceOptions deterministic_options(std::uint64_t seed = 1);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// ---- generators -----------------------------------------------------------

using Rng = std::mt19937_64;

/// A payload compatible with `kind` and satisfying its own invariants.
/// Returns nullopt for kinds that admit no selectors.
std::optional<SelectorPayload> random_payload(Rng& rng, ResourceKind kind);

/// Random graph built only through LinkService: `resources` resources drawn
/// from a locator pool (so some dedupe), selectors on them, then up to
/// `links` links over random endpoints.
void populate(LinkService& core, Rng& rng, std::size_t resources, std::size_t links);

// ---- oracles --------------------------------------------------------------

/// Links having `id` among their targets, or for a resource, a target
/// selector referring to it. Linear scan over every link.
std::set<EntityId> brute_backlinks(const Graph& graph, const EntityId& id);

/// Number of distinct links naming `id` anywhere. Linear scan.
std::size_t brute_reference_count(const Graph& graph, const EntityId& id);

/// What delete_link(link) must remove, computed before the deletion.
CleanupReport expected_cleanup(const Graph& graph, const EntityId& link_id);

/// Integrity recomputed without check_integrity: every endpoint and every
/// selector's resource resolves, unreferenced selectors are pending, one
/// resource per locator, payloads fit their resource kind. Empty = healthy.
std::vector<std::string> brute_integrity(const Graph& graph);

/// Sort-then-modulo colour assignment.
std::map<EntityId, int> oracle_colors(const std::vector<presentation::HighlightPosition>& highlights);

/// Every failed layout constraint, as readable text. Empty = all hold.
std::vector<std::string> check_layout(const std::vector<presentation::AnchorBox>& anchors,
                                      const std::vector<presentation::WidgetRequest>& widgets,
                                      const presentation::MarginSpec& margins,
                                      const std::map<EntityId, int>& colors,
                                      const std::vector<presentation::WidgetPlacement>& placements);

/// Every start offset of `needle` in `hay`, overlapping, by direct comparison.
std::vector<std::size_t> naive_occurrences(const std::u32string& hay, const std::u32string& needle);

/// Expected anchor: the unique occurrence with the longest contiguous context
/// agreement, ambiguous on ties, orphaned without occurrences. Offsets are
/// checked for an exact hit first.
struct OracleAnchor {
  std::string status;
  std::optional<std::int64_t> start;
};
OracleAnchor oracle_anchor(const std::u32string& page, std::int64_t char_start, const std::u32string& quote,
                           const std::u32string& prefix, const std::u32string& suffix);

std::string utf8(const std::u32string& text);

/// The interchange document with every id replaced by a name derived from
/// entity content alone, and arrays sorted by that content. Two documents
/// describe isomorphic graphs iff their canonical forms are equal.
nlohmann::json canonical_form(const interchange::Document& doc);

}  // namespace xannot::testing
