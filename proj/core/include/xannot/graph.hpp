/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "xannot/model.hpp"

namespace xannot {

struct PutResource {
  Resource resource;
};
struct PutSelector {
  Selector selector;
  bool pending = false;  // not yet the endpoint of any link
};
struct PutLink {
  Link link;
};
struct DeleteResource {
  EntityId id;
};
struct DeleteSelector {
  EntityId id;
};
struct DeleteLink {
  EntityId id;
};

using Mutation =
    std::variant<PutResource, PutSelector, PutLink, DeleteResource, DeleteSelector, DeleteLink>;

/// Ordered list of mutations applied all-or-nothing by Store::commit.
struct Transaction {
  std::vector<Mutation> mutations;

  void put(Resource resource) { mutations.emplace_back(PutResource{std::move(resource)}); }
  void put(Selector selector, bool pending = false) {
    mutations.emplace_back(PutSelector{std::move(selector), pending});
  }
  void put(Link link) { mutations.emplace_back(PutLink{std::move(link)}); }
  void erase_resource(EntityId id) { mutations.emplace_back(DeleteResource{id}); }
  void erase_selector(EntityId id) { mutations.emplace_back(DeleteSelector{id}); }
  void erase_link(EntityId id) { mutations.emplace_back(DeleteLink{id}); }

  bool empty() const { return mutations.empty(); }
};

struct IntegrityIssue {
  EntityId subject;
  std::string detail;

  bool operator==(const IntegrityIssue&) const = default;
};

struct IntegrityReport {
  std::vector<IntegrityIssue> dangling_endpoints;
  std::vector<IntegrityIssue> orphan_selectors;
  std::vector<IntegrityIssue> kind_violations;
  bool ok = true;

  nlohmann::json to_json() const;
};

/// In-memory entity graph plus the incremental indices used for traversal.
/// Value type: the store copies it to build the next version, readers hold
/// immutable snapshots.
class Graph {
 public:
  const std::map<EntityId, Resource>& resources() const { return resources_; }
  const std::map<EntityId, Selector>& selectors() const { return selectors_; }
  const std::map<EntityId, Link>& links() const { return links_; }
  const std::set<EntityId>& pending_selectors() const { return pending_; }

  const Resource* find_resource(const EntityId& id) const;
  const Selector* find_selector(const EntityId& id) const;
  const Link* find_link(const EntityId& id) const;
  const Resource* find_by_locator(const std::string& locator) const;
  bool contains(const Endpoint& endpoint) const;
  bool is_pending(const EntityId& selector_id) const { return pending_.contains(selector_id); }

  /// Links naming `id` (resource or selector) directly as a target / source.
  const std::set<EntityId>& links_targeting(const EntityId& id) const;
  const std::set<EntityId>& links_sourcing(const EntityId& id) const;
  const std::set<EntityId>& selectors_of(const EntityId& resource_id) const;

  /// Number of distinct links that reference `id` as a source or target.
  std::size_t reference_count(const EntityId& id) const;

  std::uint64_t version() const { return version_; }
  void set_version(std::uint64_t version) { version_ = version; }

  /// Applies one mutation without any integrity gate. Deleting an absent id
  /// throws Error{UnknownEntity}.
  void apply(const Mutation& mutation);

  /// Rebuilds every index from the primary maps and compares.
  bool indices_consistent() const;

 private:
  struct Indices {
    std::unordered_map<std::string, EntityId> by_locator;
    std::map<EntityId, std::set<EntityId>> targeted_by;
    std::map<EntityId, std::set<EntityId>> sourced_by;
    std::map<EntityId, std::set<EntityId>> selectors_of;

    bool operator==(const Indices&) const = default;
  };

  static Indices build_indices(const std::map<EntityId, Resource>& resources,
                               const std::map<EntityId, Selector>& selectors,
                               const std::map<EntityId, Link>& links);
  void index_link(const Link& link);
  void unindex_link(const Link& link);
  void unindex_resource(const Resource& resource);

  std::map<EntityId, Resource> resources_;
  std::map<EntityId, Selector> selectors_;
  std::map<EntityId, Link> links_;
  std::set<EntityId> pending_;
  Indices index_;
  std::uint64_t version_ = 0;
};

/// Full recomputation over the primary maps; never consults the indices.
IntegrityReport check_integrity(const Graph& graph);

}  // namespace xannot
