/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/codec.hpp"

#include "xannot/error.hpp"

namespace xannot::codec {

namespace {

[[noreturn]] void malformed(std::string message) {
  throw Error(ErrorCode::MalformedDocument, std::move(message));
}

void put_optional(json& out, const char* key, const std::optional<std::string>& value) {
  if (value) out[key] = *value;
}

template <typename T>
json array_of(const std::vector<T>& items) {
  json out = json::array();
  for (const auto& item : items) out.push_back(to_json(item));
  return out;
}

template <typename T, typename Parse>
std::vector<T> parse_array(const json& value, std::string_view key, Parse parse) {
  const auto& arr = member(value, key);
  if (!arr.is_array()) malformed(std::string(key) + " must be an array");
  std::vector<T> out;
  out.reserve(arr.size());
  for (const auto& item : arr) out.push_back(parse(item));
  return out;
}

std::string string_or_empty(const json& object, std::string_view key) {
  return optional_string(object, key).value_or("");
}

}  // namespace

const json& member(const json& object, std::string_view key) {
  if (!object.is_object()) malformed("expected an object");
  const auto it = object.find(key);
  if (it == object.end()) malformed("missing field '" + std::string(key) + "'");
  return *it;
}

std::string string_member(const json& object, std::string_view key) {
  const auto& value = member(object, key);
  if (!value.is_string()) malformed("field '" + std::string(key) + "' must be a string");
  return value.get<std::string>();
}

std::optional<std::string> optional_string(const json& object, std::string_view key) {
  if (!object.is_object()) malformed("expected an object");
  const auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) malformed("field '" + std::string(key) + "' must be a string");
  return it->get<std::string>();
}

std::int64_t int_member(const json& object, std::string_view key) {
  const auto& value = member(object, key);
  if (!value.is_number_integer()) malformed("field '" + std::string(key) + "' must be an integer");
  return value.get<std::int64_t>();
}

double number_member(const json& object, std::string_view key) {
  const auto& value = member(object, key);
  if (!value.is_number()) malformed("field '" + std::string(key) + "' must be a number");
  return value.get<double>();
}

json to_json(const EntityId& id) { return id.str(); }

json to_json(const SelectorPayload& payload) {
  struct Encode {
    json operator()(const TextSpan& s) const {
      return {{"type", "text_span"},         {"page_index", s.page_index},
              {"char_start", s.char_start},  {"char_end", s.char_end},
              {"exact_quote", s.exact_quote}, {"prefix", s.prefix},
              {"suffix", s.suffix}};
    }
    json operator()(const PageRegion& r) const {
      return {{"type", "page_region"}, {"page_index", r.page_index}, {"x", r.x},
              {"y", r.y},              {"w", r.w},                   {"h", r.h}};
    }
    json operator()(const TimeSegment& t) const {
      return {{"type", "time_segment"}, {"start_ms", t.start_ms}, {"end_ms", t.end_ms}};
    }
    json operator()(const WebFragment& f) const {
      json out = {{"type", "web_fragment"},
                  {"exact_quote", f.exact_quote},
                  {"prefix", f.prefix},
                  {"suffix", f.suffix}};
      put_optional(out, "element_path", f.element_path);
      return out;
    }
  };
  return std::visit(Encode{}, payload);
}

json to_json(const Resource& r) {
  json out = {{"id", r.id.str()}, {"kind", std::string(to_string(r.kind))}, {"created_at", r.created_at}};
  put_optional(out, "locator", r.locator);
  put_optional(out, "title", r.title);
  put_optional(out, "media_type", r.media_type);
  put_optional(out, "comment_body", r.comment_body);
  return out;
}

json to_json(const Selector& s) {
  return {{"id", s.id.str()},
          {"resource_id", s.resource_id.str()},
          {"payload", to_json(s.payload)},
          {"created_at", s.created_at}};
}

json to_json(const Endpoint& e) {
  return {{"kind", e.kind == Endpoint::Kind::resource ? "resource" : "selector"}, {"id", e.id.str()}};
}

json to_json(const Link& l) {
  return {{"id", l.id.str()},
          {"sources", array_of(l.sources)},
          {"targets", array_of(l.targets)},
          {"annotation_class", std::string(to_string(l.annotation_class))},
          {"formality", std::string(to_string(l.formality))},
          {"created_at", l.created_at}};
}

json to_json(const AnnotationBundle& b) {
  json colors = json::object();
  for (const auto& [id, index] : b.colors) colors[id.str()] = index;
  return {{"document", to_json(b.document)},
          {"highlights", array_of(b.highlights)},
          {"links", array_of(b.links)},
          {"target_selectors", array_of(b.target_selectors)},
          {"target_resources", array_of(b.target_resources)},
          {"colors", std::move(colors)}};
}

json to_json(const CleanupReport& report) {
  return {{"removed_selectors", array_of(report.removed_selectors)},
          {"removed_resources", array_of(report.removed_resources)}};
}

EntityId parse_id(const json& value) {
  if (!value.is_string()) malformed("entity id must be a string");
  const auto id = EntityId::parse(value.get<std::string>());
  if (!id) malformed("malformed entity id '" + value.get<std::string>() + "'");
  return *id;
}

SelectorPayload parse_payload(const json& value) {
  const auto type = string_member(value, "type");
  if (type == "text_span") {
    return TextSpan{static_cast<int>(int_member(value, "page_index")), int_member(value, "char_start"),
                    int_member(value, "char_end"), string_member(value, "exact_quote"),
                    string_or_empty(value, "prefix"), string_or_empty(value, "suffix")};
  }
  if (type == "page_region") {
    return PageRegion{static_cast<int>(int_member(value, "page_index")), number_member(value, "x"),
                      number_member(value, "y"), number_member(value, "w"), number_member(value, "h")};
  }
  if (type == "time_segment") {
    return TimeSegment{int_member(value, "start_ms"), int_member(value, "end_ms")};
  }
  if (type == "web_fragment") {
    return WebFragment{string_member(value, "exact_quote"), string_or_empty(value, "prefix"),
                       string_or_empty(value, "suffix"), optional_string(value, "element_path")};
  }
  malformed("unknown selector payload type '" + type + "'");
}

Resource parse_resource(const json& value) {
  Resource r;
  r.id = parse_id(member(value, "id"));
  const auto kind = string_member(value, "kind");
  const auto parsed = parse_resource_kind(kind);
  if (!parsed) throw Error(ErrorCode::InvalidKind, "unknown resource kind '" + kind + "'");
  r.kind = *parsed;
  r.locator = optional_string(value, "locator");
  r.title = optional_string(value, "title");
  r.media_type = optional_string(value, "media_type");
  r.comment_body = optional_string(value, "comment_body");
  r.created_at = int_member(value, "created_at");
  return r;
}

Selector parse_selector(const json& value) {
  return Selector{parse_id(member(value, "id")), parse_id(member(value, "resource_id")),
                  parse_payload(member(value, "payload")), int_member(value, "created_at")};
}

Endpoint parse_endpoint(const json& value) {
  const auto kind = string_member(value, "kind");
  const auto id = parse_id(member(value, "id"));
  if (kind == "resource") return Endpoint::resource(id);
  if (kind == "selector") return Endpoint::selector(id);
  malformed("endpoint kind must be 'resource' or 'selector'");
}

Link parse_link(const json& value) {
  Link l;
  l.id = parse_id(member(value, "id"));
  l.sources = parse_array<Endpoint>(value, "sources", parse_endpoint);
  l.targets = parse_array<Endpoint>(value, "targets", parse_endpoint);
  const auto cls = optional_string(value, "annotation_class").value_or("unspecified");
  const auto parsed_cls = parse_annotation_class(cls);
  if (!parsed_cls) throw Error(ErrorCode::InvalidKind, "unknown annotation_class '" + cls + "'");
  l.annotation_class = *parsed_cls;
  const auto formality = optional_string(value, "formality").value_or("unspecified");
  const auto parsed_formality = parse_formality(formality);
  if (!parsed_formality) throw Error(ErrorCode::InvalidKind, "unknown formality '" + formality + "'");
  l.formality = *parsed_formality;
  l.created_at = int_member(value, "created_at");
  return l;
}

AnnotationBundle parse_bundle(const json& value) {
  AnnotationBundle b;
  b.document = parse_resource(member(value, "document"));
  b.highlights = parse_array<Selector>(value, "highlights", parse_selector);
  b.links = parse_array<Link>(value, "links", parse_link);
  b.target_selectors = parse_array<Selector>(value, "target_selectors", parse_selector);
  b.target_resources = parse_array<Resource>(value, "target_resources", parse_resource);
  const auto& colors = member(value, "colors");
  if (!colors.is_object()) malformed("colors must be an object");
  for (const auto& [key, index] : colors.items()) {
    if (!index.is_number_integer()) malformed("color index must be an integer");
    b.colors[parse_id(json(key))] = index.get<int>();
  }
  return b;
}

}  // namespace xannot::codec
