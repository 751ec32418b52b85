/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include "support.hpp"
#include "xannot/anchoring.hpp"
#include "xannot/error.hpp"

namespace xannot {
namespace {

using anchoring::AnchorStatus;
using anchoring::PageTextSnapshot;
using anchoring::resolve_text_anchor;

const std::string kPage = "In his essay As We May Think, Bush describes the memex.";

TextSpan quote_at(std::int64_t start) {
  return {0, start, start + 15, "As We May Think", "his essay ", ", Bush"};
}

TEST(Anchoring, ExactWhenOffsetsStillMatch) {
  const auto r = resolve_text_anchor(quote_at(13), PageTextSnapshot(0, kPage));
  EXPECT_EQ(r.status, AnchorStatus::exact);
  EXPECT_EQ(r.resolved_start, 13);
  EXPECT_EQ(r.resolved_end, 28);
}

TEST(Anchoring, ShiftedByInsertion) {
  const auto r = resolve_text_anchor(quote_at(13), PageTextSnapshot(0, "12345" + kPage));
  EXPECT_EQ(r.status, AnchorStatus::reanchored);
  EXPECT_EQ(r.resolved_start, 18);
  EXPECT_EQ(r.resolved_end, 33);
}

TEST(Anchoring, OrphanedWhenQuoteIsGone) {
  const auto r = resolve_text_anchor(quote_at(13), PageTextSnapshot(0, "In his essay, Bush describes the memex."));
  EXPECT_EQ(r.status, AnchorStatus::orphaned);
  EXPECT_FALSE(r.resolved_start.has_value());
}

TEST(Anchoring, ContextBreaksTies) {
  const std::string page = "x As We May Think, Bush. his essay As We May Think, Bush";
  const auto r = resolve_text_anchor(quote_at(0), PageTextSnapshot(0, page));
  EXPECT_EQ(r.status, AnchorStatus::reanchored);
  EXPECT_EQ(r.resolved_start, 35);
}

TEST(Anchoring, EqualContextIsAmbiguous) {
  const std::string page = "his essay As We May Think, Bush / his essay As We May Think, Bush";
  const auto r = resolve_text_anchor(quote_at(0), PageTextSnapshot(0, page));
  EXPECT_EQ(r.status, AnchorStatus::ambiguous);
  EXPECT_FALSE(r.resolved_start.has_value());
}

TEST(Anchoring, OffsetsCountCodePointsAfterNormalization) {
  const auto snapshot = PageTextSnapshot(0, "Résumé:\n\n  As   We May Think");
  EXPECT_EQ(snapshot.utf8(), "Résumé: As We May Think");
  const auto r = resolve_text_anchor(TextSpan{0, 0, 15, "As We May Think", "", ""}, snapshot);
  EXPECT_EQ(r.status, AnchorStatus::reanchored);
  EXPECT_EQ(r.resolved_start, 8);
}

TEST(Anchoring, PageMismatch) {
  try {
    resolve_text_anchor(quote_at(0), PageTextSnapshot(3, kPage));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PageMismatch);
  }
}

TEST(Anchoring, IsPure) {
  const PageTextSnapshot snapshot(0, "aaa As We May Think bbb As We May Think");
  const auto first = resolve_text_anchor(quote_at(2), snapshot);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(resolve_text_anchor(quote_at(2), snapshot), first);
}

TEST(Anchoring, AgreesWithNaiveScanOnRandomPages) {
  // Small alphabet so quotes recur and every status shows up.
  testing::Rng rng(17);
  const std::u32string alphabet = U"ab é";
  std::map<std::string, int> seen;
  for (int round = 0; round < 3000; ++round) {
    std::u32string page;
    for (int i = 0, n = 20 + static_cast<int>(rng() % 60); i < n; ++i) {
      const char32_t c = alphabet[rng() % alphabet.size()];
      if (c == U' ' && (page.empty() || page.back() == U' ')) continue;
      page += c;
    }
    if (page.size() < 8) continue;
    const std::size_t len = 2 + rng() % 4;
    const std::size_t at = rng() % (page.size() - len);
    const auto quote = page.substr(at, len);
    const auto prefix = page.substr(at >= 6 ? at - 6 : 0, at >= 6 ? 6 : at);
    const auto suffix = page.substr(at + len, 6);
    // Perturb the page so the stored offset is sometimes stale.
    std::u32string current = page;
    if (rng() % 3 != 0) current.insert(rng() % (current.size() + 1), std::u32string(1 + rng() % 3, U'b'));
    if (rng() % 5 == 0) current.erase(rng() % current.size(), 1 + rng() % 3);

    const TextSpan span{0, static_cast<std::int64_t>(at), static_cast<std::int64_t>(at + len), testing::utf8(quote),
                        testing::utf8(prefix), testing::utf8(suffix)};
    const PageTextSnapshot snapshot(0, testing::utf8(current));
    if (snapshot.text() != current) continue;  // the oracle works on already-normalized text

    const auto got = resolve_text_anchor(span, snapshot);
    const auto want = testing::oracle_anchor(current, span.char_start, quote, prefix, suffix);
    ++seen[want.status];
    ASSERT_EQ(std::string(anchoring::to_string(got.status)), want.status) << testing::utf8(current);
    EXPECT_EQ(got.resolved_start, want.start);
    if (want.start) EXPECT_EQ(got.resolved_end, *want.start + static_cast<std::int64_t>(len));
  }
  for (const char* status : {"exact", "reanchored", "ambiguous", "orphaned"}) EXPECT_GT(seen[status], 0) << status;
}

TEST(ValidateSelector, SegmentWithinDuration) {
  const Resource video{EntityId(0, 1), ResourceKind::video, "file:///bush.mp4", {}, {}, {}, 0};
  const Selector ok{EntityId(0, 2), video.id, TimeSegment{0, 1000}, 0};
  const Selector long_one{EntityId(0, 3), video.id, TimeSegment{0, 20'000}, 0};
  anchoring::MediaExtent extent{std::nullopt, 10'000};
  EXPECT_TRUE(anchoring::validate_selector(ok, video, extent).empty());
  const auto v = anchoring::validate_selector(long_one, video, extent);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, "segment_exceeds_duration");
  EXPECT_TRUE(anchoring::validate_selector(long_one, video).empty());
}

TEST(ValidateSelector, ReportsEveryViolation) {
  const Resource pdf{EntityId(0, 1), ResourceKind::pdf_document, "file:///a.pdf", {}, {}, {}, 0};
  const Selector wide{EntityId(0, 2), pdf.id, PageRegion{7, 0.9, 0.1, 0.2, 0.1}, 0};
  const auto v = anchoring::validate_selector(wide, pdf, anchoring::MediaExtent{5, std::nullopt});
  std::set<std::string> codes;
  for (const auto& x : v) codes.insert(x.code);
  EXPECT_EQ(codes, (std::set<std::string>{"coordinates_out_of_range", "page_out_of_range"}));

  const Resource web{EntityId(0, 3), ResourceKind::web_page, "https://x", {}, {}, {}, 0};
  const auto mismatch = anchoring::validate_selector(wide, web);
  codes.clear();
  for (const auto& x : mismatch) codes.insert(x.code);
  EXPECT_TRUE(codes.contains("resource_mismatch"));
  EXPECT_TRUE(codes.contains("kind_incompatible"));
}

}  // namespace
}  // namespace xannot
