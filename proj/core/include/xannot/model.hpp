/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xannot/entity_id.hpp"

namespace xannot {

enum class ResourceKind { pdf_document, web_page, video, audio, image, comment };
enum class AnnotationClass { comment, explanation, example, unspecified };
enum class Formality { formal, informal, unspecified };

std::string_view to_string(ResourceKind kind);
std::string_view to_string(AnnotationClass value);
std::string_view to_string(Formality value);

std::optional<ResourceKind> parse_resource_kind(std::string_view text);
std::optional<AnnotationClass> parse_annotation_class(std::string_view text);
std::optional<Formality> parse_formality(std::string_view text);

/// Maximum stored length of selector context, in code points.
inline constexpr std::size_t kMaxContextLength = 64;

struct TextSpan {
  int page_index = 0;
  std::int64_t char_start = 0;
  std::int64_t char_end = 0;  // exclusive
  std::string exact_quote;
  std::string prefix;
  std::string suffix;

  bool operator==(const TextSpan&) const = default;
};

/// Page-normalized rectangle, origin top-left.
struct PageRegion {
  int page_index = 0;
  double x = 0, y = 0, w = 0, h = 0;

  bool operator==(const PageRegion&) const = default;
};

struct TimeSegment {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  bool operator==(const TimeSegment&) const = default;
};

struct WebFragment {
  std::string exact_quote;
  std::string prefix;
  std::string suffix;
  std::optional<std::string> element_path;

  bool operator==(const WebFragment&) const = default;
};

using SelectorPayload = std::variant<TextSpan, PageRegion, TimeSegment, WebFragment>;

std::string_view payload_type_name(const SelectorPayload& payload);

struct Resource {
  EntityId id;
  ResourceKind kind = ResourceKind::pdf_document;
  std::optional<std::string> locator;
  std::optional<std::string> title;
  std::optional<std::string> media_type;
  std::optional<std::string> comment_body;
  std::int64_t created_at = 0;

  bool operator==(const Resource&) const = default;
};

struct Selector {
  EntityId id;
  EntityId resource_id;  // RefersTo
  SelectorPayload payload;
  std::int64_t created_at = 0;

  bool operator==(const Selector&) const = default;
};

struct Endpoint {
  enum class Kind { resource, selector };

  Kind kind = Kind::selector;
  EntityId id;

  static Endpoint resource(EntityId id) { return {Kind::resource, id}; }
  static Endpoint selector(EntityId id) { return {Kind::selector, id}; }

  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

struct Link {
  EntityId id;
  std::vector<Endpoint> sources;  // HasSources
  std::vector<Endpoint> targets;  // HasTargets
  AnnotationClass annotation_class = AnnotationClass::unspecified;
  Formality formality = Formality::unspecified;
  std::int64_t created_at = 0;

  bool operator==(const Link&) const = default;
};

/// Everything needed to re-render the annotations of one document.
struct AnnotationBundle {
  Resource document;
  std::vector<Selector> highlights;
  std::vector<Link> links;
  std::vector<Selector> target_selectors;
  std::vector<Resource> target_resources;
  std::map<EntityId, int> colors;

  bool operator==(const AnnotationBundle&) const = default;
};

struct CleanupReport {
  std::vector<EntityId> removed_selectors;
  std::vector<EntityId> removed_resources;

  bool operator==(const CleanupReport&) const = default;
};

/// One broken invariant: a stable snake_case code plus a readable message.
struct Violation {
  std::string code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Intrinsic invariant checks shared by the write path, selector validation
// and the integrity checker. Empty means valid.

std::vector<Violation> resource_violations(const Resource& resource);
std::vector<Violation> payload_violations(const SelectorPayload& payload);
bool payload_compatible(ResourceKind kind, const SelectorPayload& payload);
std::vector<Violation> link_shape_violations(const Link& link);

/// Whitespace-collapses quotes and context and trims context to kMaxContextLength.
SelectorPayload normalize_payload(SelectorPayload payload);

}  // namespace xannot
