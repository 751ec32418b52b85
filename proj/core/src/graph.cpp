/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/graph.hpp"

#include <set>

#include "xannot/error.hpp"

namespace xannot {

namespace {

const std::set<EntityId>& lookup(const std::map<EntityId, std::set<EntityId>>& index,
                                 const EntityId& id) {
  static const std::set<EntityId> kEmpty;
  const auto it = index.find(id);
  return it == index.end() ? kEmpty : it->second;
}

void erase_from(std::map<EntityId, std::set<EntityId>>& index, const EntityId& key,
                const EntityId& value) {
  const auto it = index.find(key);
  if (it == index.end()) return;
  it->second.erase(value);
  if (it->second.empty()) index.erase(it);
}

nlohmann::json issues_json(const std::vector<IntegrityIssue>& issues) {
  auto out = nlohmann::json::array();
  for (const auto& issue : issues) out.push_back({{"id", issue.subject.str()}, {"detail", issue.detail}});
  return out;
}

[[noreturn]] void unknown(const char* what, const EntityId& id) {
  throw Error(ErrorCode::UnknownEntity, std::string("no ") + what + " " + id.str(),
              {{"id", id.str()}});
}

}  // namespace

nlohmann::json IntegrityReport::to_json() const {
  return {{"ok", ok},
          {"dangling_endpoints", issues_json(dangling_endpoints)},
          {"orphan_selectors", issues_json(orphan_selectors)},
          {"kind_violations", issues_json(kind_violations)}};
}

const Resource* Graph::find_resource(const EntityId& id) const {
  const auto it = resources_.find(id);
  return it == resources_.end() ? nullptr : &it->second;
}

const Selector* Graph::find_selector(const EntityId& id) const {
  const auto it = selectors_.find(id);
  return it == selectors_.end() ? nullptr : &it->second;
}

const Link* Graph::find_link(const EntityId& id) const {
  const auto it = links_.find(id);
  return it == links_.end() ? nullptr : &it->second;
}

const Resource* Graph::find_by_locator(const std::string& locator) const {
  const auto it = index_.by_locator.find(locator);
  return it == index_.by_locator.end() ? nullptr : find_resource(it->second);
}

bool Graph::contains(const Endpoint& endpoint) const {
  return endpoint.kind == Endpoint::Kind::resource ? resources_.contains(endpoint.id)
                                                   : selectors_.contains(endpoint.id);
}

const std::set<EntityId>& Graph::links_targeting(const EntityId& id) const {
  return lookup(index_.targeted_by, id);
}

const std::set<EntityId>& Graph::links_sourcing(const EntityId& id) const {
  return lookup(index_.sourced_by, id);
}

const std::set<EntityId>& Graph::selectors_of(const EntityId& resource_id) const {
  return lookup(index_.selectors_of, resource_id);
}

std::size_t Graph::reference_count(const EntityId& id) const {
  const auto& targeting = links_targeting(id);
  const auto& sourcing = links_sourcing(id);
  std::size_t count = targeting.size();
  for (const auto& link : sourcing) {
    if (!targeting.contains(link)) ++count;
  }
  return count;
}

void Graph::index_link(const Link& link) {
  for (const auto& e : link.sources) index_.sourced_by[e.id].insert(link.id);
  for (const auto& e : link.targets) index_.targeted_by[e.id].insert(link.id);
}

void Graph::unindex_link(const Link& link) {
  for (const auto& e : link.sources) erase_from(index_.sourced_by, e.id, link.id);
  for (const auto& e : link.targets) erase_from(index_.targeted_by, e.id, link.id);
}

void Graph::unindex_resource(const Resource& resource) {
  if (!resource.locator) return;
  const auto it = index_.by_locator.find(*resource.locator);
  if (it != index_.by_locator.end() && it->second == resource.id) index_.by_locator.erase(it);
}

void Graph::apply(const Mutation& mutation) {
  struct Apply {
    Graph& g;

    void operator()(const PutResource& m) const {
      if (const auto* old = g.find_resource(m.resource.id)) g.unindex_resource(*old);
      g.resources_[m.resource.id] = m.resource;
      if (m.resource.locator) g.index_.by_locator.try_emplace(*m.resource.locator, m.resource.id);
    }
    void operator()(const PutSelector& m) const {
      const auto& s = m.selector;
      if (const auto* old = g.find_selector(s.id)) erase_from(g.index_.selectors_of, old->resource_id, s.id);
      g.selectors_[s.id] = s;
      g.index_.selectors_of[s.resource_id].insert(s.id);
      if (m.pending && g.reference_count(s.id) == 0) {
        g.pending_.insert(s.id);
      } else {
        g.pending_.erase(s.id);
      }
    }
    void operator()(const PutLink& m) const {
      if (const auto* old = g.find_link(m.link.id)) g.unindex_link(*old);
      g.links_[m.link.id] = m.link;
      g.index_link(m.link);
      for (const auto* list : {&m.link.sources, &m.link.targets}) {
        for (const auto& e : *list) {
          if (e.kind == Endpoint::Kind::selector) g.pending_.erase(e.id);
        }
      }
    }
    void operator()(const DeleteResource& m) const {
      const auto* old = g.find_resource(m.id);
      if (!old) unknown("resource", m.id);
      g.unindex_resource(*old);
      g.resources_.erase(m.id);
    }
    void operator()(const DeleteSelector& m) const {
      const auto* old = g.find_selector(m.id);
      if (!old) unknown("selector", m.id);
      erase_from(g.index_.selectors_of, old->resource_id, m.id);
      g.pending_.erase(m.id);
      g.selectors_.erase(m.id);
    }
    void operator()(const DeleteLink& m) const {
      const auto* old = g.find_link(m.id);
      if (!old) unknown("link", m.id);
      g.unindex_link(*old);
      g.links_.erase(m.id);
    }
  };
  std::visit(Apply{*this}, mutation);
}

Graph::Indices Graph::build_indices(const std::map<EntityId, Resource>& resources,
                                    const std::map<EntityId, Selector>& selectors,
                                    const std::map<EntityId, Link>& links) {
  Indices out;
  for (const auto& [id, r] : resources) {
    if (r.locator) out.by_locator.try_emplace(*r.locator, id);
  }
  for (const auto& [id, s] : selectors) out.selectors_of[s.resource_id].insert(id);
  for (const auto& [id, l] : links) {
    for (const auto& e : l.sources) out.sourced_by[e.id].insert(id);
    for (const auto& e : l.targets) out.targeted_by[e.id].insert(id);
  }
  return out;
}

bool Graph::indices_consistent() const {
  return build_indices(resources_, selectors_, links_) == index_;
}

IntegrityReport check_integrity(const Graph& graph) {
  IntegrityReport report;

  std::map<std::string, EntityId> first_with_locator;
  for (const auto& [id, r] : graph.resources()) {
    for (auto& v : resource_violations(r)) report.kind_violations.push_back({id, std::move(v.message)});
    if (r.locator) {
      const auto [it, inserted] = first_with_locator.emplace(*r.locator, id);
      if (!inserted) {
        report.kind_violations.push_back(
            {id, "locator already stored by resource " + it->second.str()});
      }
    }
  }

  for (const auto& [id, s] : graph.selectors()) {
    const auto& resources = graph.resources();
    const auto owner = resources.find(s.resource_id);
    if (owner == resources.end()) {
      report.dangling_endpoints.push_back({id, "selector refers to missing resource " + s.resource_id.str()});
    } else if (!payload_compatible(owner->second.kind, s.payload)) {
      report.kind_violations.push_back(
          {id, std::string(payload_type_name(s.payload)) + " selector on " +
                   std::string(to_string(owner->second.kind)) + " resource"});
    }
    for (auto& v : payload_violations(s.payload)) report.kind_violations.push_back({id, std::move(v.message)});
  }

  std::set<EntityId> referenced;
  for (const auto& [id, l] : graph.links()) {
    for (auto& v : link_shape_violations(l)) report.kind_violations.push_back({id, std::move(v.message)});
    for (const auto* list : {&l.sources, &l.targets}) {
      for (const auto& e : *list) {
        const bool is_resource = e.kind == Endpoint::Kind::resource;
        const bool present = is_resource ? graph.resources().contains(e.id)
                                         : graph.selectors().contains(e.id);
        if (!present) {
          report.dangling_endpoints.push_back(
              {id, std::string("missing ") + (is_resource ? "resource " : "selector ") + e.id.str()});
        }
        referenced.insert(e.id);
      }
    }
  }

  for (const auto& [id, s] : graph.selectors()) {
    if (!referenced.contains(id) && !graph.pending_selectors().contains(id)) {
      report.orphan_selectors.push_back({id, "selector is not an endpoint of any link"});
    }
  }

  report.ok = report.dangling_endpoints.empty() && report.orphan_selectors.empty() &&
              report.kind_violations.empty();
  return report;
}

}  // namespace xannot
