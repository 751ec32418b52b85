/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/interchange.hpp"

#include <algorithm>
#include <set>

#include "xannot/codec.hpp"
#include "xannot/error.hpp"

namespace xannot::interchange {

namespace {

template <typename T>
void sort_by_id(std::vector<T>& items) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.id < b.id; });
}

template <typename T>
nlohmann::json encode_all(const std::vector<T>& items) {
  auto out = nlohmann::json::array();
  for (const auto& item : items) out.push_back(codec::to_json(item));
  return out;
}

template <typename T, typename Parse>
std::vector<T> decode_all(const nlohmann::json& value, std::string_view key, Parse parse,
                          std::set<EntityId>& seen) {
  const auto& arr = codec::member(value, key);
  if (!arr.is_array()) throw Error(ErrorCode::MalformedDocument, std::string(key) + " must be an array");
  std::vector<T> out;
  for (const auto& item : arr) {
    out.push_back(parse(item));
    if (!seen.insert(out.back().id).second) {
      throw Error(ErrorCode::MalformedDocument, "duplicate id " + out.back().id.str());
    }
  }
  return out;
}

}  // namespace

nlohmann::json encode(Document doc) {
  sort_by_id(doc.resources);
  sort_by_id(doc.selectors);
  sort_by_id(doc.links);
  nlohmann::json out = {{"schema_version", doc.schema_version},
                        {"resources", encode_all(doc.resources)},
                        {"selectors", encode_all(doc.selectors)},
                        {"links", encode_all(doc.links)}};
  if (doc.document) out["document"] = doc.document->str();
  return out;
}

Document decode(const nlohmann::json& value) {
  if (!value.is_object()) throw Error(ErrorCode::MalformedDocument, "interchange document must be an object");
  const auto version = value.find("schema_version");
  if (version == value.end() || !version->is_number_integer()) {
    throw Error(ErrorCode::MalformedDocument, "schema_version missing");
  }
  if (version->get<std::int64_t>() != kSchemaVersion) {
    throw Error(ErrorCode::VersionUnsupported,
                "schema_version " + version->dump() + " is not supported",
                {{"supported", kSchemaVersion}});
  }
  try {
    Document doc;
    std::set<EntityId> seen;
    if (const auto it = value.find("document"); it != value.end() && !it->is_null()) {
      doc.document = codec::parse_id(*it);
    }
    doc.resources = decode_all<Resource>(value, "resources", codec::parse_resource, seen);
    doc.selectors = decode_all<Selector>(value, "selectors", codec::parse_selector, seen);
    doc.links = decode_all<Link>(value, "links", codec::parse_link, seen);
    return doc;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedDocument) throw;
    throw Error(ErrorCode::MalformedDocument, e.what(), {{"cause", std::string(to_string(e.code()))}});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
}

Document from_graph(const Graph& graph) {
  Document doc;
  for (const auto& [id, r] : graph.resources()) doc.resources.push_back(r);
  for (const auto& [id, s] : graph.selectors()) doc.selectors.push_back(s);
  for (const auto& [id, l] : graph.links()) doc.links.push_back(l);
  return doc;
}

std::string serialize(const nlohmann::json& value) { return value.dump(2) + "\n"; }

}  // namespace xannot::interchange
