/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xannot/model.hpp"

namespace xannot::anchoring {

/// Extracted text of one page, whitespace-normalized on construction.
class PageTextSnapshot {
 public:
  PageTextSnapshot(int page_index, std::string_view utf8_text);

  int page_index() const { return page_index_; }
  const std::u32string& text() const { return text_; }
  std::string utf8() const;

 private:
  int page_index_;
  std::u32string text_;
};

enum class AnchorStatus { exact, reanchored, ambiguous, orphaned };
std::string_view to_string(AnchorStatus status);

struct AnchorResult {
  AnchorStatus status = AnchorStatus::orphaned;
  std::optional<std::int64_t> resolved_start;
  std::optional<std::int64_t> resolved_end;

  bool operator==(const AnchorResult&) const = default;
};

/// Locates a text span in the current page text.
///
/// The stored offsets win when they still cover the quote. Otherwise every
/// occurrence of the quote is scored by how many characters of the stored
/// prefix (read backwards) and suffix (read forwards) agree with the text
/// around it. A unique best score re-anchors; a tie is ambiguous; no
/// occurrence is orphaned. Throws Error{PageMismatch}.
AnchorResult resolve_text_anchor(const TextSpan& selector, const PageTextSnapshot& snapshot);

struct MediaExtent {
  std::optional<int> page_count;
  std::optional<std::int64_t> duration_ms;
};

/// All violations of `selector` against its resource and, if known, the
/// media extent. Empty means valid.
std::vector<Violation> validate_selector(const Selector& selector, const Resource& resource,
                                         const std::optional<MediaExtent>& extent = {});

}  // namespace xannot::anchoring
