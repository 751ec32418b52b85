/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/presentation.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

#include "xannot/error.hpp"

namespace xannot::presentation {

namespace {

struct Column {
  std::vector<std::size_t> slots;  // indices into the placement list, top to bottom
};

}  // namespace

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

const std::array<Rgb, kPaletteSize>& palette() {
  static const std::array<Rgb, kPaletteSize> kPalette = {{
      {0x20, 0x20, 0xdf},  // 240 blue
      {0xdf, 0x80, 0x20},  //  30 orange
      {0x20, 0xdf, 0xdf},  // 180 cyan
      {0xdf, 0x20, 0x80},  // 330 rose
      {0x20, 0xdf, 0x20},  // 120 green
      {0x7f, 0x20, 0xdf},  // 270 violet
      {0xdf, 0xdf, 0x20},  //  60 yellow
      {0x20, 0x7f, 0xdf},  // 210 azure
      {0xdf, 0x20, 0x20},  //   0 red
      {0x20, 0xdf, 0x80},  // 150 spring green
      {0xdf, 0x20, 0xdf},  // 300 magenta
      {0x80, 0xdf, 0x20},  //  90 chartreuse
  }};
  return kPalette;
}

std::map<EntityId, int> assign_colors(const std::vector<HighlightPosition>& highlights) {
  std::set<EntityId> seen;
  for (const auto& h : highlights) {
    if (!seen.insert(h.selector_id).second) {
      throw Error(ErrorCode::DuplicateSelectorId, "selector " + h.selector_id.str() + " listed twice",
                  {{"id", h.selector_id.str()}});
    }
  }
  auto ordered = highlights;
  std::sort(ordered.begin(), ordered.end(), [](const HighlightPosition& a, const HighlightPosition& b) {
    return std::tie(a.page_index, a.y, a.x, a.selector_id) < std::tie(b.page_index, b.y, b.x, b.selector_id);
  });
  std::map<EntityId, int> out;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    out[ordered[i].selector_id] = static_cast<int>(i % kPaletteSize);
  }
  return out;
}

std::string_view to_string(Side side) { return side == Side::left ? "left" : "right"; }

std::vector<WidgetPlacement> layout_widgets(const std::vector<AnchorBox>& anchors,
                                            const std::vector<WidgetRequest>& widgets,
                                            const MarginSpec& margins,
                                            const std::map<EntityId, int>& colors) {
  std::unordered_map<EntityId, const AnchorBox*> anchor_of;
  for (const auto& a : anchors) {
    if (!anchor_of.emplace(a.selector_id, &a).second) {
      throw Error(ErrorCode::DuplicateSelectorId, "anchor " + a.selector_id.str() + " listed twice",
                  {{"id", a.selector_id.str()}});
    }
  }

  const double band_height = margins.page_bottom - margins.page_top;
  std::vector<const AnchorBox*> widget_anchor(widgets.size());
  for (std::size_t i = 0; i < widgets.size(); ++i) {
    const auto& w = widgets[i];
    const auto it = anchor_of.find(w.anchor_selector_id);
    if (it == anchor_of.end() || !colors.contains(w.anchor_selector_id)) {
      throw Error(ErrorCode::UnknownAnchor,
                  "widget for link " + w.link_id.str() + " names unknown anchor " + w.anchor_selector_id.str(),
                  {{"link_id", w.link_id.str()}, {"anchor_selector_id", w.anchor_selector_id.str()}});
    }
    widget_anchor[i] = it->second;
    if (w.w > margins.left_width && w.w > margins.right_width) {
      throw Error(ErrorCode::WidgetTooWide, "widget for link " + w.link_id.str() + " fits neither margin",
                  {{"link_id", w.link_id.str()}, {"w", w.w}});
    }
    if (w.h > band_height) {
      throw Error(ErrorCode::MarginOverflow, "widget for link " + w.link_id.str() + " is taller than the page",
                  {{"link_id", w.link_id.str()}, {"h", w.h}});
    }
  }

  std::vector<std::size_t> order(widgets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(widget_anchor[a]->page_index, widget_anchor[a]->y) <
           std::tie(widget_anchor[b]->page_index, widget_anchor[b]->y);
  });

  std::vector<WidgetPlacement> placed;
  std::vector<double> target;  // desired y of each placement, clamped to the band
  placed.reserve(widgets.size());
  std::map<std::pair<int, Side>, Column> columns;

  auto band_x = [&](Side side, double w) {
    return side == Side::left ? margins.left_width - w : margins.viewport_width - margins.right_width;
  };
  auto next_free = [&](const Column& column) {
    if (column.slots.empty()) return -std::numeric_limits<double>::infinity();
    const auto& last = placed[column.slots.back()];
    return last.y + last.h + margins.gap;
  };
  // Puts the widget at the bottom of the band and pushes the column up.
  auto clamp_into = [&](Column& column, double h) -> std::optional<double> {
    const double y = margins.page_bottom - h;
    std::vector<std::pair<std::size_t, double>> moved;
    double limit = y - margins.gap;
    for (auto it = column.slots.rbegin(); it != column.slots.rend(); ++it) {
      auto& p = placed[*it];
      if (p.y + p.h <= limit) break;
      const double new_y = limit - p.h;
      if (new_y < margins.page_top) return std::nullopt;
      moved.emplace_back(*it, new_y);
      limit = new_y - margins.gap;
    }
    for (const auto& [slot, new_y] : moved) placed[slot].y = new_y;
    return y;
  };

  for (const auto i : order) {
    const auto& w = widgets[i];
    const auto& anchor = *widget_anchor[i];
    const bool fits_left = w.w <= margins.left_width;
    const bool fits_right = w.w <= margins.right_width;

    Side preferred = fits_right ? Side::right : Side::left;
    if (fits_left && fits_right) {
      const double to_left = anchor.x - margins.left_width;
      const double to_right = (margins.viewport_width - margins.right_width) - (anchor.x + anchor.w);
      preferred = to_left < to_right ? Side::left : Side::right;
    }
    const Side other = preferred == Side::left ? Side::right : Side::left;
    const bool other_fits = other == Side::left ? fits_left : fits_right;

    const double desired = std::clamp(anchor.y, margins.page_top, margins.page_bottom - w.h);
    std::optional<std::pair<Side, double>> spot;
    for (const Side side : {preferred, other}) {
      if (side == other && !other_fits) break;
      const double y = std::max(desired, next_free(columns[{anchor.page_index, side}]));
      if (y + w.h <= margins.page_bottom) {
        spot = {side, y};
        break;
      }
    }
    if (!spot) {
      const std::vector<Side> clamp_order =
          other_fits ? std::vector<Side>{other, preferred} : std::vector<Side>{preferred};
      for (const Side side : clamp_order) {
        if (const auto y = clamp_into(columns[{anchor.page_index, side}], w.h)) {
          spot = {side, *y};
          break;
        }
      }
    }
    if (!spot) {
      throw Error(ErrorCode::MarginOverflow,
                  "no room left in the margins of page " + std::to_string(anchor.page_index),
                  {{"link_id", w.link_id.str()}, {"page_index", anchor.page_index}});
    }

    const auto [side, y] = *spot;
    columns[{anchor.page_index, side}].slots.push_back(placed.size());
    placed.push_back({w.link_id, w.anchor_selector_id, anchor.page_index, side, band_x(side, w.w), y, w.w,
                      w.h, colors.at(w.anchor_selector_id)});
    target.push_back(desired);
  }

  // Pull widgets back toward their anchors wherever the neighbours leave room.
  for (auto& [key, column] : columns) {
    auto& slots = column.slots;
    for (std::size_t k = slots.size(); k-- > 0;) {
      auto& p = placed[slots[k]];
      if (p.y >= target[slots[k]]) continue;
      const double limit = k + 1 < slots.size() ? placed[slots[k + 1]].y - margins.gap - p.h
                                                : margins.page_bottom - p.h;
      p.y = std::max(p.y, std::min(target[slots[k]], limit));
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      auto& p = placed[slots[k]];
      if (p.y <= target[slots[k]]) continue;
      const double limit = k > 0 ? placed[slots[k - 1]].y + placed[slots[k - 1]].h + margins.gap
                                 : margins.page_top;
      p.y = std::min(p.y, std::max(target[slots[k]], limit));
    }
  }
  return placed;
}

}  // namespace xannot::presentation
