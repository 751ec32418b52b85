/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xannot/graph.hpp"

namespace xannot::interchange {

/// Files sharing annotations use this extension.
inline constexpr std::string_view kFileExtension = ".xannot.json";
inline constexpr int kSchemaVersion = 1;

/// Decoded `.xannot.json` document.
struct Document {
  int schema_version = kSchemaVersion;
  std::optional<EntityId> document;
  std::vector<Resource> resources;
  std::vector<Selector> selectors;
  std::vector<Link> links;
};

/// Entity arrays are sorted by id so equal graphs encode identically.
nlohmann::json encode(Document doc);

/// Throws Error{VersionUnsupported} or Error{MalformedDocument}.
Document decode(const nlohmann::json& value);

/// Whole graph as a document.
Document from_graph(const Graph& graph);

/// Canonical text: two-space indent, sorted keys, trailing newline.
std::string serialize(const nlohmann::json& value);

}  // namespace xannot::interchange
