/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "xannot/entity_id.hpp"

namespace xannot::presentation {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;

  std::string hex() const;
  bool operator==(const Rgb&) const = default;
};

inline constexpr std::size_t kPaletteSize = 12;

/// Twelve hues spaced 30 degrees apart (HSL saturation 0.75, lightness 0.5).
/// Index 0 is blue; each following entry steps 150 degrees around the wheel so
/// consecutive indices are never neighbouring hues.
///
///   0 #2020df blue        4 #20df20 green        8 #df2020 red
///   1 #df8020 orange      5 #7f20df violet       9 #20df80 spring green
///   2 #20dfdf cyan        6 #dfdf20 yellow      10 #df20df magenta
///   3 #df2080 rose        7 #207fdf azure       11 #80df20 chartreuse
const std::array<Rgb, kPaletteSize>& palette();

struct HighlightPosition {
  EntityId selector_id;
  int page_index = 0;
  double y = 0;
  double x = 0;
};

/// Sorts by (page, y, x, id) and gives the i-th highlight index i mod 12.
/// Throws Error{DuplicateSelectorId}.
std::map<EntityId, int> assign_colors(const std::vector<HighlightPosition>& highlights);

/// Rendered highlight box; y is page-local and grows downward.
struct AnchorBox {
  EntityId selector_id;
  int page_index = 0;
  double x = 0, y = 0, w = 0, h = 0;
};

struct MarginSpec {
  double left_width = 0;
  double right_width = 0;
  /// Left band is [0, left_width), right band is [viewport_width - right_width, viewport_width).
  double viewport_width = 0;
  double page_top = 0;
  double page_bottom = 0;
  /// Minimum vertical spacing between widgets in one column.
  double gap = 0;
};

struct WidgetRequest {
  EntityId link_id;
  EntityId anchor_selector_id;
  double w = 0;
  double h = 0;
};

enum class Side { left, right };
std::string_view to_string(Side side);

struct WidgetPlacement {
  EntityId link_id;
  EntityId anchor_selector_id;
  int page_index = 0;
  Side side = Side::right;
  double x = 0, y = 0, w = 0, h = 0;
  int palette_index = 0;

  bool operator==(const WidgetPlacement&) const = default;
};

/// Greedy top-down placement of pop-up widgets into the page margins.
///
/// Widgets are visited by (anchor page, anchor y, input order). Each goes to
/// the nearer band that is wide enough (ties go right) at its anchor's y,
/// pushed below the previous widget of that column plus `gap`. A widget that
/// would run past page_bottom spills to the other band; if that overflows
/// too it is clamped to page_bottom - h and the column above is pushed up.
/// A final pass pulls widgets back toward their anchors where room allows.
///
/// Throws Error{UnknownAnchor} for a widget or color lookup without an
/// anchor, Error{WidgetTooWide} when no band fits, Error{MarginOverflow} when
/// neither column of the page can hold the widgets.
std::vector<WidgetPlacement> layout_widgets(const std::vector<AnchorBox>& anchors,
                                            const std::vector<WidgetRequest>& widgets,
                                            const MarginSpec& margins,
                                            const std::map<EntityId, int>& colors);

}  // namespace xannot::presentation
