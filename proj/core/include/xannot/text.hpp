/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace xannot::text {

// Offsets and lengths in selectors count Unicode code points, not bytes.

std::optional<std::u32string> decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view text);

bool is_valid_utf8(std::string_view utf8);
std::size_t length(std::string_view utf8);

/// Collapses every run of whitespace into a single space. Idempotent.
std::u32string normalize(std::u32string_view text);
std::string normalize(std::string_view utf8);

/// Last / first `n` code points.
std::string tail(std::string_view utf8, std::size_t n);
std::string head(std::string_view utf8, std::size_t n);

}  // namespace xannot::text
