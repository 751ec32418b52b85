/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/anchoring.hpp"

#include <algorithm>
#include <functional>

#include "xannot/error.hpp"
#include "xannot/text.hpp"

namespace xannot::anchoring {

namespace {

std::u32string normalized(std::string_view utf8) {
  const auto decoded = text::decode_utf8(utf8);
  return decoded ? text::normalize(*decoded) : std::u32string{};
}

/// Characters of `prefix`, read from its end, that match the text just before `at`.
std::size_t prefix_agreement(const std::u32string& text, std::size_t at, const std::u32string& prefix) {
  std::size_t n = 0;
  while (n < prefix.size() && n < at && text[at - 1 - n] == prefix[prefix.size() - 1 - n]) ++n;
  return n;
}

std::size_t suffix_agreement(const std::u32string& text, std::size_t at, const std::u32string& suffix) {
  std::size_t n = 0;
  while (n < suffix.size() && at + n < text.size() && text[at + n] == suffix[n]) ++n;
  return n;
}

}  // namespace

PageTextSnapshot::PageTextSnapshot(int page_index, std::string_view utf8_text)
    : page_index_(page_index), text_(normalized(utf8_text)) {}

std::string PageTextSnapshot::utf8() const { return text::encode_utf8(text_); }

std::string_view to_string(AnchorStatus status) {
  switch (status) {
    case AnchorStatus::exact: return "exact";
    case AnchorStatus::reanchored: return "reanchored";
    case AnchorStatus::ambiguous: return "ambiguous";
    case AnchorStatus::orphaned: return "orphaned";
  }
  return "unknown";
}

AnchorResult resolve_text_anchor(const TextSpan& selector, const PageTextSnapshot& snapshot) {
  if (selector.page_index != snapshot.page_index()) {
    throw Error(ErrorCode::PageMismatch,
                "selector is on page " + std::to_string(selector.page_index) + ", snapshot is page " +
                    std::to_string(snapshot.page_index()),
                {{"selector_page", selector.page_index}, {"snapshot_page", snapshot.page_index()}});
  }
  const auto& page = snapshot.text();
  const auto quote = normalized(selector.exact_quote);
  if (quote.empty()) return {AnchorStatus::orphaned, {}, {}};

  const auto start = selector.char_start;
  const auto end = selector.char_end;
  if (start >= 0 && end - start == static_cast<std::int64_t>(quote.size()) &&
      end <= static_cast<std::int64_t>(page.size()) &&
      page.compare(static_cast<std::size_t>(start), quote.size(), quote) == 0) {
    return {AnchorStatus::exact, start, end};
  }

  const auto prefix = normalized(selector.prefix);
  const auto suffix = normalized(selector.suffix);
  const std::boyer_moore_horspool_searcher searcher(quote.begin(), quote.end());

  std::size_t best_score = 0;
  std::size_t best_at = 0;
  std::size_t best_count = 0;
  for (auto it = page.begin();;) {
    const auto found = std::search(it, page.end(), searcher);
    if (found == page.end()) break;
    const auto at = static_cast<std::size_t>(found - page.begin());
    const auto score = prefix_agreement(page, at, prefix) + suffix_agreement(page, at + quote.size(), suffix);
    if (best_count == 0 || score > best_score) {
      best_score = score;
      best_at = at;
      best_count = 1;
    } else if (score == best_score) {
      ++best_count;
    }
    it = found + 1;
  }

  if (best_count == 0) return {AnchorStatus::orphaned, {}, {}};
  if (best_count > 1) return {AnchorStatus::ambiguous, {}, {}};
  const auto resolved = static_cast<std::int64_t>(best_at);
  return {AnchorStatus::reanchored, resolved, resolved + static_cast<std::int64_t>(quote.size())};
}

std::vector<Violation> validate_selector(const Selector& selector, const Resource& resource,
                                         const std::optional<MediaExtent>& extent) {
  std::vector<Violation> out;
  if (selector.resource_id != resource.id) {
    out.push_back({"resource_mismatch", "selector refers to " + selector.resource_id.str() +
                                            ", not " + resource.id.str()});
  }
  if (!payload_compatible(resource.kind, selector.payload)) {
    out.push_back({"kind_incompatible", std::string(payload_type_name(selector.payload)) +
                                            " selector on " + std::string(to_string(resource.kind)) +
                                            " resource"});
  }
  auto intrinsic = payload_violations(selector.payload);
  out.insert(out.end(), intrinsic.begin(), intrinsic.end());
  if (!extent) return out;

  auto check_page = [&](int page_index) {
    if (extent->page_count && page_index >= *extent->page_count) {
      out.push_back({"page_out_of_range", "page_index " + std::to_string(page_index) +
                                              " beyond page count " + std::to_string(*extent->page_count)});
    }
  };
  if (const auto* span = std::get_if<TextSpan>(&selector.payload)) check_page(span->page_index);
  if (const auto* region = std::get_if<PageRegion>(&selector.payload)) check_page(region->page_index);
  if (const auto* segment = std::get_if<TimeSegment>(&selector.payload)) {
    if (extent->duration_ms && segment->end_ms > *extent->duration_ms) {
      out.push_back({"segment_exceeds_duration", "segment ends at " + std::to_string(segment->end_ms) +
                                                     " ms, media lasts " +
                                                     std::to_string(*extent->duration_ms) + " ms"});
    }
  }
  return out;
}

}  // namespace xannot::anchoring
