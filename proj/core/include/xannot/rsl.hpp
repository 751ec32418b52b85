/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xannot/interchange.hpp"
#include "xannot/model.hpp"
#include "xannot/presentation.hpp"
#include "xannot/store.hpp"

namespace xannot {

struct CreatedResource {
  Resource resource;
  bool created = false;  // false when an existing resource matched the locator
};

struct CapturedFragment {
  Resource resource;
  std::optional<Selector> selector;
  bool resource_created = false;
};

struct ImportResult {
  std::map<EntityId, EntityId> id_map;  // imported id -> stored id
  std::size_t resources_created = 0;
  std::size_t resources_reused = 0;
  std::size_t selectors_created = 0;
  std::size_t links_created = 0;
};

struct LinkServiceOptions {
  IdGenerator ids;  // defaults to random ids
  Clock clock;      // defaults to the system clock
};

/// Resource-selector-link operations over a Store. Every mutating call is one
/// store transaction built under the store's writer lock; reads work on the
/// latest snapshot. Safe to share between threads.
class LinkService {
 public:
  explicit LinkService(Store& store, LinkServiceOptions options = {});

  /// `value` is the locator, or the body for comments. Non-comment resources
  /// are deduplicated by exact locator.
  CreatedResource create_resource(ResourceKind kind, const std::string& value,
                                  std::optional<std::string> title = {},
                                  std::optional<std::string> media_type = {});

  /// The selector stays pending until a link first uses it.
  Selector create_selector(const EntityId& resource_id, SelectorPayload payload);

  /// Resource (deduplicated) plus optional selector in one transaction.
  CapturedFragment capture(ResourceKind kind, const std::string& locator,
                           std::optional<std::string> title,
                           std::optional<std::string> media_type,
                           std::optional<SelectorPayload> selection);

  Link create_link(std::vector<Endpoint> sources, std::vector<Endpoint> targets,
                   AnnotationClass annotation_class = AnnotationClass::unspecified,
                   Formality formality = Formality::unspecified);

  /// Removes the link, then every selector and comment resource it referenced
  /// whose reference count dropped to zero.
  CleanupReport delete_link(const EntityId& link_id);

  AnnotationBundle annotations_for(const EntityId& document_id) const;

  /// Links having `entity_id` among their targets; for a resource, also links
  /// targeting any of its selectors. Ordered by (created_at, id).
  std::vector<Link> backlinks_for(const EntityId& entity_id) const;

  std::optional<Resource> resource(const EntityId& id) const;
  std::optional<Resource> resource_by_locator(const std::string& locator) const;
  std::optional<Selector> selector(const EntityId& id) const;
  std::optional<Link> link(const EntityId& id) const;

  /// Whole store, or the closed bundle of one document.
  interchange::Document export_bundle(std::optional<EntityId> document_id = {}) const;

  /// Fresh ids for everything; resources with a known locator map onto the
  /// stored row. Links are always created anew, so importing twice duplicates them.
  ImportResult import_bundle(const interchange::Document& doc);

  Store& store() { return store_; }
  const Store& store() const { return store_; }

 private:
  std::int64_t now() const;
  EntityId next_id();

  Store& store_;
  LinkServiceOptions options_;
};

/// Highlight positions derived from selector geometry alone. A page region
/// uses its top-left corner; a text span sits at char_start divided by the
/// largest char_end among the text highlights of its page.
std::vector<presentation::HighlightPosition> highlight_positions(
    const std::vector<Selector>& highlights);

}  // namespace xannot
