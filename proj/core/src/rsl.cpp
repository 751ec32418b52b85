/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/rsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "xannot/codec.hpp"
#include "xannot/error.hpp"

namespace xannot {

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

nlohmann::json violations_json(const std::vector<Violation>& items) {
  auto out = nlohmann::json::array();
  for (const auto& v : items) out.push_back({{"code", v.code}, {"message", v.message}});
  return out;
}

bool id_taken(const Graph& graph, const EntityId& id) {
  return id.is_nil() || graph.resources().contains(id) || graph.selectors().contains(id) ||
         graph.links().contains(id);
}

void dedupe(std::vector<Endpoint>& endpoints) {
  std::set<Endpoint> seen;
  std::erase_if(endpoints, [&](const Endpoint& e) { return !seen.insert(e).second; });
}

template <typename T>
void sort_by_creation(std::vector<T>& items) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) {
    return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
  });
}

/// Checks a selector payload against the resource it will refer to.
SelectorPayload checked_payload(const Resource& resource, SelectorPayload payload) {
  payload = normalize_payload(std::move(payload));
  if (!payload_compatible(resource.kind, payload)) {
    throw Error(ErrorCode::IncompatibleSelectorKind,
                std::string(payload_type_name(payload)) + " selectors cannot address a " +
                    std::string(to_string(resource.kind)) + " resource",
                {{"resource_kind", std::string(to_string(resource.kind))},
                 {"payload_type", std::string(payload_type_name(payload))}});
  }
  if (const auto violations = payload_violations(payload); !violations.empty()) {
    throw Error(ErrorCode::InvalidPayload, violations.front().message, {{"violations", violations_json(violations)}});
  }
  return payload;
}

}  // namespace

LinkService::LinkService(Store& store, LinkServiceOptions options)
    : store_(store), options_(std::move(options)) {
  if (!options_.ids) options_.ids = random_id_generator();
  if (!options_.clock) options_.clock = system_clock_ms();
}

std::int64_t LinkService::now() const { return options_.clock(); }

EntityId LinkService::next_id() { return options_.ids(); }

CreatedResource LinkService::create_resource(ResourceKind kind, const std::string& value,
                                             std::optional<std::string> title,
                                             std::optional<std::string> media_type) {
  Resource resource;
  resource.kind = kind;
  resource.title = std::move(title);
  resource.media_type = std::move(media_type);
  if (kind == ResourceKind::comment) {
    if (blank(value)) throw Error(ErrorCode::EmptyBody, "comment body is empty");
    resource.comment_body = value;
  } else {
    if (blank(value)) throw Error(ErrorCode::EmptyLocator, "resource locator is empty");
    resource.locator = value;
  }
  if (const auto violations = resource_violations(resource); !violations.empty()) {
    throw Error(ErrorCode::InvalidPayload, violations.front().message, {{"violations", violations_json(violations)}});
  }

  CreatedResource result;
  store_.update([&](const Graph& graph, Transaction& tx) {
    if (resource.locator) {
      if (const auto* existing = graph.find_by_locator(*resource.locator)) {
        result = {*existing, false};
        return;
      }
    }
    do {
      resource.id = next_id();
    } while (id_taken(graph, resource.id));
    resource.created_at = now();
    tx.put(resource);
    result = {resource, true};
  });
  return result;
}

Selector LinkService::create_selector(const EntityId& resource_id, SelectorPayload payload) {
  Selector selector;
  store_.update([&](const Graph& graph, Transaction& tx) {
    const auto* resource = graph.find_resource(resource_id);
    if (!resource) {
      throw Error(ErrorCode::UnknownResource, "no resource " + resource_id.str(), {{"id", resource_id.str()}});
    }
    selector.payload = checked_payload(*resource, std::move(payload));
    selector.resource_id = resource_id;
    do {
      selector.id = next_id();
    } while (id_taken(graph, selector.id));
    selector.created_at = now();
    tx.put(selector, /*pending=*/true);
  });
  return selector;
}

CapturedFragment LinkService::capture(ResourceKind kind, const std::string& locator,
                                      std::optional<std::string> title,
                                      std::optional<std::string> media_type,
                                      std::optional<SelectorPayload> selection) {
  if (kind == ResourceKind::comment) {
    throw Error(ErrorCode::InvalidPayload, "comments are created directly, not captured");
  }
  if (blank(locator)) throw Error(ErrorCode::EmptyLocator, "capture locator is empty");

  CapturedFragment result;
  store_.update([&](const Graph& graph, Transaction& tx) {
    if (const auto* existing = graph.find_by_locator(locator)) {
      result.resource = *existing;
      result.resource_created = false;
    } else {
      Resource& r = result.resource;
      r.kind = kind;
      r.locator = locator;
      r.title = title;
      r.media_type = media_type;
      if (const auto violations = resource_violations(r); !violations.empty()) {
        throw Error(ErrorCode::InvalidPayload, violations.front().message, {{"violations", violations_json(violations)}});
      }
      do {
        r.id = next_id();
      } while (id_taken(graph, r.id));
      r.created_at = now();
      tx.put(r);
      result.resource_created = true;
    }
    if (selection) {
      Selector s;
      s.payload = checked_payload(result.resource, std::move(*selection));
      s.resource_id = result.resource.id;
      do {
        s.id = next_id();
      } while (id_taken(graph, s.id) || s.id == result.resource.id);
      s.created_at = now();
      tx.put(s, /*pending=*/true);
      result.selector = std::move(s);
    }
  });
  return result;
}

Link LinkService::create_link(std::vector<Endpoint> sources, std::vector<Endpoint> targets,
                              AnnotationClass annotation_class, Formality formality) {
  if (sources.empty()) throw Error(ErrorCode::EmptySources, "a link needs at least one source");
  if (targets.empty()) throw Error(ErrorCode::EmptyTargets, "a link needs at least one target");
  dedupe(sources);
  dedupe(targets);
  for (const auto& s : sources) {
    if (std::find(targets.begin(), targets.end(), s) != targets.end()) {
      throw Error(ErrorCode::SelfReference, "endpoint " + s.id.str() + " is both source and target",
                  {{"endpoint", codec::to_json(s)}});
    }
  }

  Link link;
  link.sources = std::move(sources);
  link.targets = std::move(targets);
  link.annotation_class = annotation_class;
  link.formality = formality;
  store_.update([&](const Graph& graph, Transaction& tx) {
    for (const auto* list : {&link.sources, &link.targets}) {
      for (const auto& e : *list) {
        if (!graph.contains(e)) {
          throw Error(ErrorCode::DanglingEndpoint, "endpoint " + e.id.str() + " does not exist",
                      {{"endpoint", codec::to_json(e)}});
        }
      }
    }
    do {
      link.id = next_id();
    } while (id_taken(graph, link.id));
    link.created_at = now();
    tx.put(link);
  });
  return link;
}

CleanupReport LinkService::delete_link(const EntityId& link_id) {
  CleanupReport report;
  store_.update([&](const Graph& graph, Transaction& tx) {
    const auto* link = graph.find_link(link_id);
    if (!link) throw Error(ErrorCode::UnknownLink, "no link " + link_id.str(), {{"id", link_id.str()}});
    tx.erase_link(link_id);

    std::set<Endpoint> endpoints(link->sources.begin(), link->sources.end());
    endpoints.insert(link->targets.begin(), link->targets.end());
    for (const auto& e : endpoints) {
      // This link is one of the references being counted.
      if (graph.reference_count(e.id) != 1) continue;
      if (e.kind == Endpoint::Kind::selector) {
        tx.erase_selector(e.id);
        report.removed_selectors.push_back(e.id);
      } else if (const auto* r = graph.find_resource(e.id); r && r->kind == ResourceKind::comment) {
        tx.erase_resource(e.id);
        report.removed_resources.push_back(e.id);
      }
    }
  });
  return report;
}

AnnotationBundle LinkService::annotations_for(const EntityId& document_id) const {
  const auto graph = store_.snapshot();
  const auto* doc = graph->find_resource(document_id);
  if (!doc) {
    throw Error(ErrorCode::UnknownResource, "no resource " + document_id.str(), {{"id", document_id.str()}});
  }
  if (doc->kind != ResourceKind::pdf_document) {
    throw Error(ErrorCode::NotADocument,
                "resource " + document_id.str() + " is a " + std::string(to_string(doc->kind)),
                {{"id", document_id.str()}, {"kind", std::string(to_string(doc->kind))}});
  }

  AnnotationBundle bundle;
  bundle.document = *doc;

  std::set<EntityId> link_ids = graph->links_sourcing(document_id);
  std::set<EntityId> highlight_ids;
  for (const auto& selector_id : graph->selectors_of(document_id)) {
    const auto& sourcing = graph->links_sourcing(selector_id);
    if (sourcing.empty()) continue;
    highlight_ids.insert(selector_id);
    link_ids.insert(sourcing.begin(), sourcing.end());
  }

  std::set<EntityId> other_selectors;
  std::set<EntityId> other_resources;
  for (const auto& id : link_ids) {
    const auto& link = *graph->find_link(id);
    bundle.links.push_back(link);
    for (const auto* list : {&link.sources, &link.targets}) {
      for (const auto& e : *list) {
        if (e.kind == Endpoint::Kind::selector) {
          if (highlight_ids.contains(e.id)) continue;
          other_selectors.insert(e.id);
          const auto owner = graph->find_selector(e.id)->resource_id;
          if (owner != document_id) other_resources.insert(owner);
        } else if (e.id != document_id) {
          other_resources.insert(e.id);
        }
      }
    }
  }
  sort_by_creation(bundle.links);
  for (const auto& id : highlight_ids) bundle.highlights.push_back(*graph->find_selector(id));
  for (const auto& id : other_selectors) bundle.target_selectors.push_back(*graph->find_selector(id));
  for (const auto& id : other_resources) bundle.target_resources.push_back(*graph->find_resource(id));

  bundle.colors = presentation::assign_colors(highlight_positions(bundle.highlights));
  return bundle;
}

std::vector<Link> LinkService::backlinks_for(const EntityId& entity_id) const {
  const auto graph = store_.snapshot();
  std::set<EntityId> ids;
  if (graph->find_resource(entity_id)) {
    ids = graph->links_targeting(entity_id);
    for (const auto& selector_id : graph->selectors_of(entity_id)) {
      const auto& targeting = graph->links_targeting(selector_id);
      ids.insert(targeting.begin(), targeting.end());
    }
  } else if (graph->find_selector(entity_id)) {
    ids = graph->links_targeting(entity_id);
  } else {
    throw Error(ErrorCode::UnknownEntity, "no resource or selector " + entity_id.str(),
                {{"id", entity_id.str()}});
  }
  std::vector<Link> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(*graph->find_link(id));
  sort_by_creation(out);
  return out;
}

std::optional<Resource> LinkService::resource(const EntityId& id) const {
  const auto graph = store_.snapshot();
  const auto* r = graph->find_resource(id);
  return r ? std::optional(*r) : std::nullopt;
}

std::optional<Resource> LinkService::resource_by_locator(const std::string& locator) const {
  const auto graph = store_.snapshot();
  const auto* r = graph->find_by_locator(locator);
  return r ? std::optional(*r) : std::nullopt;
}

std::optional<Selector> LinkService::selector(const EntityId& id) const {
  const auto graph = store_.snapshot();
  const auto* s = graph->find_selector(id);
  return s ? std::optional(*s) : std::nullopt;
}

std::optional<Link> LinkService::link(const EntityId& id) const {
  const auto graph = store_.snapshot();
  const auto* l = graph->find_link(id);
  return l ? std::optional(*l) : std::nullopt;
}

interchange::Document LinkService::export_bundle(std::optional<EntityId> document_id) const {
  if (!document_id) return interchange::from_graph(*store_.snapshot());
  const auto bundle = annotations_for(*document_id);
  interchange::Document doc;
  doc.document = document_id;
  doc.resources.push_back(bundle.document);
  doc.resources.insert(doc.resources.end(), bundle.target_resources.begin(), bundle.target_resources.end());
  doc.selectors = bundle.highlights;
  doc.selectors.insert(doc.selectors.end(), bundle.target_selectors.begin(), bundle.target_selectors.end());
  doc.links = bundle.links;
  return doc;
}

ImportResult LinkService::import_bundle(const interchange::Document& doc) {
  std::set<EntityId> resource_ids;
  std::set<EntityId> selector_ids;
  for (const auto& r : doc.resources) resource_ids.insert(r.id);
  for (const auto& s : doc.selectors) {
    selector_ids.insert(s.id);
    if (!resource_ids.contains(s.resource_id)) {
      throw Error(ErrorCode::MalformedDocument,
                  "selector " + s.id.str() + " refers to a resource outside the document");
    }
  }
  std::set<EntityId> linked;
  for (const auto& l : doc.links) {
    for (const auto* list : {&l.sources, &l.targets}) {
      for (const auto& e : *list) {
        const auto& pool = e.kind == Endpoint::Kind::resource ? resource_ids : selector_ids;
        if (!pool.contains(e.id)) {
          throw Error(ErrorCode::MalformedDocument,
                      "link " + l.id.str() + " names endpoint " + e.id.str() + " outside the document");
        }
        linked.insert(e.id);
      }
    }
  }

  ImportResult result;
  try {
    store_.update([&](const Graph& graph, Transaction& tx) {
      result = {};
      std::set<EntityId> issued;
      auto fresh = [&] {
        EntityId id;
        do {
          id = next_id();
        } while (id_taken(graph, id) || issued.contains(id));
        issued.insert(id);
        return id;
      };
      std::map<std::string, EntityId> imported_locators;
      for (auto r : doc.resources) {
        const auto original = r.id;
        if (r.kind != ResourceKind::comment && r.locator) {
          if (const auto* existing = graph.find_by_locator(*r.locator)) {
            result.id_map[original] = existing->id;
            ++result.resources_reused;
            continue;
          }
          if (const auto it = imported_locators.find(*r.locator); it != imported_locators.end()) {
            result.id_map[original] = it->second;
            ++result.resources_reused;
            continue;
          }
        }
        r.id = fresh();
        if (r.locator) imported_locators.emplace(*r.locator, r.id);
        result.id_map[original] = r.id;
        tx.put(r);
        ++result.resources_created;
      }
      for (auto s : doc.selectors) {
        const auto original = s.id;
        s.id = fresh();
        s.resource_id = result.id_map.at(s.resource_id);
        result.id_map[original] = s.id;
        tx.put(s, /*pending=*/!linked.contains(original));
        ++result.selectors_created;
      }
      for (auto l : doc.links) {
        const auto original = l.id;
        l.id = fresh();
        for (auto* list : {&l.sources, &l.targets}) {
          for (auto& e : *list) e.id = result.id_map.at(e.id);
        }
        result.id_map[original] = l.id;
        tx.put(l);
        ++result.links_created;
      }
    });
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IntegrityViolation) throw;
    throw Error(ErrorCode::MalformedDocument, "imported entities violate graph invariants", e.details());
  }
  return result;
}

std::vector<presentation::HighlightPosition> highlight_positions(const std::vector<Selector>& highlights) {
  std::map<int, double> text_extent;
  for (const auto& s : highlights) {
    if (const auto* span = std::get_if<TextSpan>(&s.payload)) {
      auto& extent = text_extent[span->page_index];
      extent = std::max(extent, static_cast<double>(span->char_end));
    }
  }
  std::vector<presentation::HighlightPosition> out;
  out.reserve(highlights.size());
  for (const auto& s : highlights) {
    presentation::HighlightPosition p{s.id, 0, 0, 0};
    if (const auto* span = std::get_if<TextSpan>(&s.payload)) {
      p.page_index = span->page_index;
      p.y = static_cast<double>(span->char_start) / std::max(1.0, text_extent[span->page_index]);
    } else if (const auto* region = std::get_if<PageRegion>(&s.payload)) {
      p.page_index = region->page_index;
      p.y = region->y;
      p.x = region->x;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace xannot
