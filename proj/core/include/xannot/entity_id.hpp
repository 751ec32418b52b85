/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace xannot {

/// 128-bit opaque identifier, rendered as lowercase 8-4-4-4-12 hex text.
class EntityId {
 public:
  constexpr EntityId() = default;
  constexpr EntityId(std::uint64_t hi, std::uint64_t lo) : hi_(hi), lo_(lo) {}

  static EntityId random();
  static std::optional<EntityId> parse(std::string_view text);

  std::string str() const;
  constexpr bool is_nil() const { return hi_ == 0 && lo_ == 0; }
  constexpr std::uint64_t hi() const { return hi_; }
  constexpr std::uint64_t lo() const { return lo_; }

  friend constexpr auto operator<=>(const EntityId&, const EntityId&) = default;

 private:
  std::uint64_t hi_ = 0;
  std::uint64_t lo_ = 0;
};

/// Source of fresh ids. Tests swap in a seeded sequence to get byte-stable output.
using IdGenerator = std::function<EntityId()>;

IdGenerator random_id_generator();

/// Deterministic ids: counter in the low word, seed in the high word.
IdGenerator sequential_id_generator(std::uint64_t seed = 0);

/// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;

Clock system_clock_ms();

}  // namespace xannot

template <>
struct std::hash<xannot::EntityId> {
  std::size_t operator()(const xannot::EntityId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.hi() ^ (id.lo() * 0x9e3779b97f4a7c15ULL));
  }
};
