/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/entity_id.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <random>

namespace xannot {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::mt19937_64& thread_rng() {
  thread_local std::mt19937_64 rng = [] {
    std::random_device device;
    std::seed_seq seq{device(), device(), device(), device(), device(), device()};
    return std::mt19937_64(seq);
  }();
  return rng;
}

}  // namespace

EntityId EntityId::random() {
  auto& rng = thread_rng();
  EntityId id;
  do {
    id = EntityId(rng(), rng());
  } while (id.is_nil());
  return id;
}

std::optional<EntityId> EntityId::parse(std::string_view text) {
  if (text.size() != 36) return std::nullopt;
  std::uint64_t words[2] = {0, 0};
  int nibbles = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (text[i] != '-') return std::nullopt;
      continue;
    }
    const int v = hex_value(text[i]);
    if (v < 0) return std::nullopt;
    auto& word = words[nibbles / 16];
    word = (word << 4) | static_cast<std::uint64_t>(v);
    ++nibbles;
  }
  return EntityId(words[0], words[1]);
}

std::string EntityId::str() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(36);
  const std::uint64_t words[2] = {hi_, lo_};
  for (int n = 0; n < 32; ++n) {
    if (n == 8 || n == 12 || n == 16 || n == 20) out.push_back('-');
    const auto word = words[n / 16];
    const int shift = 60 - 4 * (n % 16);
    out.push_back(kDigits[(word >> shift) & 0xF]);
  }
  return out;
}

IdGenerator random_id_generator() {
  return [] { return EntityId::random(); };
}

IdGenerator sequential_id_generator(std::uint64_t seed) {
  auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
  return [counter, seed] { return EntityId(seed, ++*counter); };
}

Clock system_clock_ms() {
  return [] {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
  };
}

}  // namespace xannot
