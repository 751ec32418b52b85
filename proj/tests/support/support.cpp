/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xannot/codec.hpp"

namespace xannot::testing {

namespace fs = std::filesystem;
using json = nlohmann::json;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("xannot-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Clock stepping_clock(std::int64_t start) {
  auto now = std::make_shared<std::atomic<std::int64_t>>(start);
  return [now] { return now->fetch_add(1); };
}

LinkServiceOptions deterministic_options(std::uint64_t seed) {
  return {sequential_id_generator(seed), stepping_clock()};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// ---- generators -----------------------------------------------------------

namespace {

const std::vector<std::string> kWords = {"memex",  "trail",   "scholar", "microfilm", "associative",
                                         "index",  "record",  "reader",  "margin",    "annotation",
                                         "hue",    "widget",  "link",    "selector",  "résumé",
                                         "naïve",  "thought", "machine", "library",   "desk"};

std::string random_words(Rng& rng, int min_words, int max_words) {
  std::uniform_int_distribution<int> count(min_words, max_words);
  std::uniform_int_distribution<std::size_t> pick(0, kWords.size() - 1);
  std::string out;
  for (int i = count(rng); i > 0; --i) out += (out.empty() ? "" : " ") + kWords[pick(rng)];
  return out;
}

double unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

std::optional<SelectorPayload> random_payload(Rng& rng, ResourceKind kind) {
  switch (kind) {
    case ResourceKind::pdf_document: {
      const int page = std::uniform_int_distribution<int>(0, 9)(rng);
      if (rng() % 2 == 0) {
        const auto start = std::uniform_int_distribution<std::int64_t>(0, 5000)(rng);
        const auto quote = random_words(rng, 1, 4);
        return TextSpan{page, start, start + static_cast<std::int64_t>(quote.size()), quote,
                        random_words(rng, 0, 3), random_words(rng, 0, 3)};
      }
      const double w = 0.05 + 0.5 * unit(rng);
      const double h = 0.05 + 0.5 * unit(rng);
      return PageRegion{page, (1.0 - w) * unit(rng), (1.0 - h) * unit(rng), w, h};
    }
    case ResourceKind::video:
    case ResourceKind::audio: {
      const auto start = std::uniform_int_distribution<std::int64_t>(0, 600'000)(rng);
      return TimeSegment{start, start + std::uniform_int_distribution<std::int64_t>(1, 120'000)(rng)};
    }
    case ResourceKind::web_page: {
      WebFragment f{random_words(rng, 1, 6), random_words(rng, 0, 2), random_words(rng, 0, 2), std::nullopt};
      if (rng() % 2 == 0) f.element_path = "/html[1]/body[1]/p[" + std::to_string(1 + rng() % 9) + "]";
      return f;
    }
    case ResourceKind::image:
    case ResourceKind::comment:
      return std::nullopt;
  }
  return std::nullopt;
}

void populate(LinkService& core, Rng& rng, std::size_t resources, std::size_t links) {
  static const ResourceKind kinds[] = {ResourceKind::pdf_document, ResourceKind::web_page, ResourceKind::video,
                                       ResourceKind::audio, ResourceKind::image};
  std::vector<Endpoint> endpoints;
  for (std::size_t i = 0; i < resources; ++i) {
    Resource r;
    if (rng() % 5 == 0) {
      r = core.create_resource(ResourceKind::comment, "note " + std::to_string(i) + ": " + random_words(rng, 2, 8))
              .resource;
    } else {
      const auto k = rng() % (resources + 1);  // a shared pool, so locators repeat
      r = core.create_resource(kinds[k % 5], "file:///res-" + std::to_string(k), "Resource " + std::to_string(k))
              .resource;
    }
    endpoints.push_back(Endpoint::resource(r.id));
    for (auto n = rng() % 4; n > 0; --n) {
      const auto payload = random_payload(rng, r.kind);
      if (!payload) break;
      endpoints.push_back(Endpoint::selector(core.create_selector(r.id, *payload).id));
    }
  }
  std::sort(endpoints.begin(), endpoints.end());
  endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());
  if (endpoints.size() < 2) return;

  std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
  for (std::size_t i = 0; i < links; ++i) {
    std::vector<Endpoint> sources{endpoints[pick(rng)]};
    std::vector<Endpoint> targets;
    if (rng() % 4 == 0) sources.push_back(endpoints[pick(rng)]);
    for (auto n = 1 + rng() % 2; n > 0; --n) {
      const auto e = endpoints[pick(rng)];
      if (std::find(sources.begin(), sources.end(), e) == sources.end()) targets.push_back(e);
    }
    if (targets.empty()) continue;
    const auto cls = static_cast<AnnotationClass>(rng() % 4);
    const auto formality = static_cast<Formality>(rng() % 3);
    core.create_link(sources, targets, cls, formality);
  }
}

// ---- oracles --------------------------------------------------------------

std::set<EntityId> brute_backlinks(const Graph& graph, const EntityId& id) {
  std::set<EntityId> out;
  for (const auto& [link_id, link] : graph.links()) {
    for (const auto& t : link.targets) {
      bool hit = t.id == id;
      if (!hit && t.kind == Endpoint::Kind::selector) {
        for (const auto& [sid, s] : graph.selectors()) {
          if (sid == t.id && s.resource_id == id) hit = true;
        }
      }
      if (hit) out.insert(link_id);
    }
  }
  return out;
}

std::size_t brute_reference_count(const Graph& graph, const EntityId& id) {
  std::size_t n = 0;
  for (const auto& [link_id, link] : graph.links()) {
    bool named = false;
    for (const auto& e : link.sources) named = named || e.id == id;
    for (const auto& e : link.targets) named = named || e.id == id;
    n += named ? 1 : 0;
  }
  return n;
}

CleanupReport expected_cleanup(const Graph& graph, const EntityId& link_id) {
  CleanupReport out;
  const auto& link = graph.links().at(link_id);
  std::set<Endpoint> endpoints(link.sources.begin(), link.sources.end());
  endpoints.insert(link.targets.begin(), link.targets.end());
  for (const auto& e : endpoints) {
    if (brute_reference_count(graph, e.id) != 1) continue;
    if (e.kind == Endpoint::Kind::selector) {
      out.removed_selectors.push_back(e.id);
    } else if (graph.resources().at(e.id).kind == ResourceKind::comment) {
      out.removed_resources.push_back(e.id);
    }
  }
  std::sort(out.removed_selectors.begin(), out.removed_selectors.end());
  std::sort(out.removed_resources.begin(), out.removed_resources.end());
  return out;
}

std::vector<std::string> brute_integrity(const Graph& graph) {
  std::vector<std::string> out;
  auto exists = [&](const Endpoint& e) {
    if (e.kind == Endpoint::Kind::resource) {
      for (const auto& [id, r] : graph.resources()) if (id == e.id) return true;
    } else {
      for (const auto& [id, s] : graph.selectors()) if (id == e.id) return true;
    }
    return false;
  };
  for (const auto& [id, link] : graph.links()) {
    if (link.sources.empty() || link.targets.empty()) out.push_back("empty side in link " + id.str());
    for (const auto& e : link.sources) if (!exists(e)) out.push_back("dangling source in " + id.str());
    for (const auto& e : link.targets) if (!exists(e)) out.push_back("dangling target in " + id.str());
    for (const auto& s : link.sources) {
      for (const auto& t : link.targets) if (s == t) out.push_back("self reference in " + id.str());
    }
  }
  std::map<std::string, int> locators;
  for (const auto& [id, r] : graph.resources()) {
    if (r.locator) ++locators[*r.locator];
    if (r.kind == ResourceKind::comment ? !r.comment_body || r.locator : !r.locator || r.comment_body) {
      out.push_back("resource shape " + id.str());
    }
  }
  for (const auto& [locator, n] : locators) if (n > 1) out.push_back("duplicate locator " + locator);
  for (const auto& [id, s] : graph.selectors()) {
    const auto owner = graph.resources().find(s.resource_id);
    if (owner == graph.resources().end()) {
      out.push_back("selector without resource " + id.str());
      continue;
    }
    const auto kind = owner->second.kind;
    const bool fits = std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, TextSpan> || std::is_same_v<P, PageRegion>) {
            return kind == ResourceKind::pdf_document;
          } else if constexpr (std::is_same_v<P, TimeSegment>) {
            return kind == ResourceKind::video || kind == ResourceKind::audio;
          } else {
            return kind == ResourceKind::web_page;
          }
        },
        s.payload);
    if (!fits) out.push_back("selector kind " + id.str());
    if (brute_reference_count(graph, id) == 0 && !graph.pending_selectors().contains(id)) {
      out.push_back("orphan selector " + id.str());
    }
  }
  return out;
}

std::map<EntityId, int> oracle_colors(const std::vector<presentation::HighlightPosition>& highlights) {
  auto sorted = highlights;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.page_index != b.page_index) return a.page_index < b.page_index;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.selector_id < b.selector_id;
  });
  std::map<EntityId, int> out;
  int i = 0;
  for (const auto& h : sorted) out[h.selector_id] = i++ % 12;
  return out;
}

std::vector<std::string> check_layout(const std::vector<presentation::AnchorBox>& anchors,
                                      const std::vector<presentation::WidgetRequest>& widgets,
                                      const presentation::MarginSpec& m,
                                      const std::map<EntityId, int>& colors,
                                      const std::vector<presentation::WidgetPlacement>& placements) {
  using presentation::Side;
  constexpr double eps = 1e-9;
  std::vector<std::string> out;
  if (placements.size() != widgets.size()) {
    out.push_back("placed " + std::to_string(placements.size()) + " of " + std::to_string(widgets.size()));
    return out;
  }
  std::map<EntityId, presentation::AnchorBox> anchor_of;
  for (const auto& a : anchors) anchor_of[a.selector_id] = a;
  std::multiset<std::pair<EntityId, EntityId>> requested, produced;
  for (const auto& w : widgets) requested.insert({w.link_id, w.anchor_selector_id});

  for (const auto& p : placements) {
    const auto who = "widget " + p.link_id.str() + ": ";
    produced.insert({p.link_id, p.anchor_selector_id});
    const auto& a = anchor_of.at(p.anchor_selector_id);
    if (p.page_index != a.page_index) out.push_back(who + "wrong page");
    if (p.palette_index != colors.at(p.anchor_selector_id)) out.push_back(who + "palette index differs from anchor");
    const double lo = p.side == Side::left ? 0.0 : m.viewport_width - m.right_width;
    const double hi = p.side == Side::left ? m.left_width : m.viewport_width;
    if (p.x < lo - eps || p.x + p.w > hi + eps) out.push_back(who + "outside its margin band horizontally");
    if (p.y < m.page_top - eps || p.y + p.h > m.page_bottom + eps) out.push_back(who + "outside the page vertically");
  }
  if (requested != produced) out.push_back("placements do not match the requested widgets");

  auto clash = [&](const presentation::WidgetPlacement& p, double y, double h) {
    return y < p.y + p.h + m.gap - eps && p.y < y + h + m.gap - eps;
  };
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const auto& p = placements[i];
    bool slot_free = true;
    const double desired = std::clamp(anchor_of.at(p.anchor_selector_id).y, m.page_top, m.page_bottom - p.h);
    for (std::size_t j = 0; j < placements.size(); ++j) {
      const auto& q = placements[j];
      if (i == j || q.page_index != p.page_index || q.side != p.side) continue;
      if (j > i && clash(q, p.y, p.h)) {
        out.push_back("widgets " + p.link_id.str() + " and " + q.link_id.str() + " overlap on one side");
      }
      if (clash(q, desired, p.h)) slot_free = false;
    }
    if (slot_free && std::abs(p.y - desired) > eps) {
      out.push_back("widget " + p.link_id.str() + " has a free slot at y=" + std::to_string(desired) +
                    " but sits at y=" + std::to_string(p.y));
    }
  }
  return out;
}

std::vector<std::size_t> naive_occurrences(const std::u32string& hay, const std::u32string& needle) {
  std::vector<std::size_t> out;
  if (needle.empty() || needle.size() > hay.size()) return out;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool same = true;
    for (std::size_t k = 0; k < needle.size() && same; ++k) same = hay[i + k] == needle[k];
    if (same) out.push_back(i);
  }
  return out;
}

OracleAnchor oracle_anchor(const std::u32string& page, std::int64_t char_start, const std::u32string& quote,
                           const std::u32string& prefix, const std::u32string& suffix) {
  const auto hits = naive_occurrences(page, quote);
  for (const auto at : hits) {
    if (static_cast<std::int64_t>(at) == char_start) return {"exact", char_start};
  }
  if (hits.empty()) return {"orphaned", std::nullopt};
  std::vector<std::size_t> scores;
  for (const auto at : hits) {
    std::size_t score = 0;
    // Walk the stored prefix backwards from its end against the text before the hit.
    auto text_it = page.rbegin() + static_cast<std::ptrdiff_t>(page.size() - at);
    for (auto p = prefix.rbegin(); p != prefix.rend() && text_it != page.rend() && *p == *text_it; ++p, ++text_it) {
      ++score;
    }
    auto fwd = page.begin() + static_cast<std::ptrdiff_t>(at + quote.size());
    for (auto s = suffix.begin(); s != suffix.end() && fwd != page.end() && *s == *fwd; ++s, ++fwd) ++score;
    scores.push_back(score);
  }
  const auto best = *std::max_element(scores.begin(), scores.end());
  if (std::count(scores.begin(), scores.end(), best) > 1) return {"ambiguous", std::nullopt};
  const auto winner = hits[static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin())];
  return {"reanchored", static_cast<std::int64_t>(winner)};
}

std::string utf8(const std::u32string& text) {
  std::string out;
  for (const char32_t c : text) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

json canonical_form(const interchange::Document& doc) {
  std::map<std::string, std::string> name;  // original id text -> canonical name

  auto rename_all = [&](std::vector<json> items) {
    for (auto& item : items) {
      item.erase("id");
      if (item.contains("resource_id")) item["resource_id"] = name.at(item["resource_id"].get<std::string>());
      for (const char* side : {"sources", "targets"}) {
        if (!item.contains(side)) continue;
        for (auto& e : item[side]) e["id"] = name.at(e["id"].get<std::string>());
      }
    }
    return items;
  };
  auto assign = [&](std::vector<json> originals, const std::string& tag) {
    const auto stripped = rename_all(originals);
    std::vector<std::size_t> order(originals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return stripped[a].dump() < stripped[b].dump(); });
    auto out = json::array();
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      const auto canonical = tag + std::to_string(rank);
      name[originals[order[rank]]["id"].get<std::string>()] = canonical;
      auto item = stripped[order[rank]];
      item["id"] = canonical;
      out.push_back(item);
    }
    return out;
  };

  std::vector<json> resources, selectors, links;
  for (const auto& r : doc.resources) resources.push_back(codec::to_json(r));
  for (const auto& s : doc.selectors) selectors.push_back(codec::to_json(s));
  for (const auto& l : doc.links) links.push_back(codec::to_json(l));

  json out;
  out["schema_version"] = doc.schema_version;
  out["resources"] = assign(resources, "r");
  out["selectors"] = assign(selectors, "s");
  out["links"] = assign(links, "l");
  out["document"] = doc.document ? json(name.at(doc.document->str())) : json(nullptr);
  return out;
}

}  // namespace xannot::testing
