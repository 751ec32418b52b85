/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <nlohmann/json.hpp>

#include "xannot/model.hpp"

// JSON vocabulary shared by the interchange format, the store log and the
// REST API. Field names follow the domain types. Absent optionals are omitted.
// Parsers throw Error{MalformedDocument} on shape errors and Error{InvalidKind}
// on unknown enum names.

namespace xannot::codec {

using json = nlohmann::json;

json to_json(const EntityId& id);
json to_json(const SelectorPayload& payload);
json to_json(const Resource& resource);
json to_json(const Selector& selector);
json to_json(const Endpoint& endpoint);
json to_json(const Link& link);
json to_json(const AnnotationBundle& bundle);
json to_json(const CleanupReport& report);

EntityId parse_id(const json& value);
SelectorPayload parse_payload(const json& value);
Resource parse_resource(const json& value);
Selector parse_selector(const json& value);
Endpoint parse_endpoint(const json& value);
Link parse_link(const json& value);
AnnotationBundle parse_bundle(const json& value);

/// Required member access with MalformedDocument on absence or type mismatch.
const json& member(const json& object, std::string_view key);
std::string string_member(const json& object, std::string_view key);
std::optional<std::string> optional_string(const json& object, std::string_view key);
std::int64_t int_member(const json& object, std::string_view key);
double number_member(const json& object, std::string_view key);

}  // namespace xannot::codec
