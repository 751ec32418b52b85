/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/service.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "xannot/anchoring.hpp"
#include "xannot/codec.hpp"
#include "xannot/interchange.hpp"
#include "xannot/presentation.hpp"

namespace xannot::service {

using json = nlohmann::json;

namespace {

struct Reply {
  int status = 200;
  json body;
};

json parse_body(const httplib::Request& req) {
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) throw Error(ErrorCode::MalformedDocument, "request body is not valid JSON");
  if (!body.is_object()) throw Error(ErrorCode::MalformedDocument, "request body must be a JSON object");
  return body;
}

EntityId path_id(const httplib::Request& req, ErrorCode unknown) {
  const auto text = req.matches[1].str();
  const auto id = EntityId::parse(text);
  if (!id) throw Error(unknown, "no entity " + text, {{"id", text}});
  return *id;
}

ResourceKind kind_member(const json& body, std::string_view key) {
  const auto text = codec::string_member(body, key);
  const auto kind = parse_resource_kind(text);
  if (!kind) throw Error(ErrorCode::InvalidKind, "unknown resource kind '" + text + "'", {{"kind", text}});
  return *kind;
}

std::vector<Endpoint> endpoints_member(const json& body, std::string_view key) {
  const auto it = body.find(key);
  if (it == body.end() || it->is_null()) return {};
  if (!it->is_array()) throw Error(ErrorCode::MalformedDocument, std::string(key) + " must be an array");
  std::vector<Endpoint> out;
  for (const auto& e : *it) out.push_back(codec::parse_endpoint(e));
  return out;
}

template <typename T>
json array_json(const std::vector<T>& items) {
  auto out = json::array();
  for (const auto& item : items) out.push_back(codec::to_json(item));
  return out;
}

presentation::MarginSpec parse_margins(const json& value) {
  presentation::MarginSpec m;
  const auto& sides = codec::member(value, "side_widths");
  m.left_width = codec::number_member(sides, "left");
  m.right_width = codec::number_member(sides, "right");
  m.viewport_width = codec::number_member(value, "viewport_width");
  m.page_top = codec::number_member(value, "page_top");
  m.page_bottom = codec::number_member(value, "page_bottom");
  m.gap = value.contains("gap") ? codec::number_member(value, "gap") : 0.0;
  if (m.left_width < 0 || m.right_width < 0 || m.gap < 0 || m.page_top >= m.page_bottom ||
      m.viewport_width < m.left_width + m.right_width) {
    throw Error(ErrorCode::InvalidPayload, "margin geometry is inconsistent");
  }
  return m;
}

json placement_json(const presentation::WidgetPlacement& p) {
  return {{"link_id", p.link_id.str()},
          {"anchor_selector_id", p.anchor_selector_id.str()},
          {"page_index", p.page_index},
          {"side", std::string(presentation::to_string(p.side))},
          {"x", p.x},
          {"y", p.y},
          {"w", p.w},
          {"h", p.h},
          {"palette_index", p.palette_index},
          {"color", presentation::palette()[static_cast<std::size_t>(p.palette_index)].hex()}};
}

json anchor_result_json(const anchoring::AnchorResult& r) {
  json out = {{"status", std::string(anchoring::to_string(r.status))}};
  if (r.resolved_start) out["resolved_start"] = *r.resolved_start;
  if (r.resolved_end) out["resolved_end"] = *r.resolved_end;
  return out;
}

}  // namespace

CapturePayload parse_capture(const json& value) {
  CapturePayload p;
  p.source_app = codec::optional_string(value, "source_app").value_or("");
  const auto& resource = codec::member(value, "resource");
  p.kind = kind_member(resource, "kind");
  p.locator = codec::string_member(resource, "locator");
  p.title = codec::optional_string(resource, "title");
  p.media_type = codec::optional_string(resource, "media_type");
  if (const auto it = value.find("selection"); it != value.end() && !it->is_null()) {
    p.selection = codec::parse_payload(*it);
  }
  if (const auto it = value.find("captured_at"); it != value.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw Error(ErrorCode::InvalidPayload, "captured_at must be epoch milliseconds");
    p.captured_at = it->get<std::int64_t>();
  }
  return p;
}

json to_json(const CapturePayload& p) {
  json resource = {{"kind", std::string(xannot::to_string(p.kind))}, {"locator", p.locator}};
  if (p.title) resource["title"] = *p.title;
  if (p.media_type) resource["media_type"] = *p.media_type;
  json out = {{"source_app", p.source_app}, {"resource", std::move(resource)}};
  if (p.selection) out["selection"] = codec::to_json(*p.selection);
  if (p.captured_at) out["captured_at"] = *p.captured_at;
  return out;
}

CaptureResult ingest_capture(LinkService& core, const CapturePayload& payload) {
  if (payload.kind == ResourceKind::comment) {
    throw Error(ErrorCode::InvalidPayload, "comment resources cannot be captured");
  }
  if (payload.selection && !payload_compatible(payload.kind, *payload.selection)) {
    throw Error(ErrorCode::IncompatibleSelectorKind,
                std::string(payload_type_name(*payload.selection)) + " selection on a " +
                    std::string(xannot::to_string(payload.kind)) + " capture");
  }
  const auto captured =
      core.capture(payload.kind, payload.locator, payload.title, payload.media_type, payload.selection);
  CaptureResult out{captured.resource.id, std::nullopt, captured.resource_created};
  if (captured.selector) out.selector_id = captured.selector->id;
  return out;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownResource:
    case ErrorCode::UnknownLink:
    case ErrorCode::UnknownEntity:
      return 404;
    case ErrorCode::MalformedDocument:
    case ErrorCode::VersionUnsupported:
      return 400;
    case ErrorCode::IntegrityViolation:
      return 409;
    case ErrorCode::IoFailure:
    case ErrorCode::BindFailure:
    case ErrorCode::StoreLocked:
      return 500;
    default:
      return 422;
  }
}

struct AnnotationService::Impl {
  ServiceConfig config;
  Store store;
  LinkService core;
  httplib::Server server;
  int port = 0;
  // stop() may race with run() reaching the listen loop; these close the gap.
  std::atomic<bool> stop_requested{false};
  std::atomic<bool> in_run{false};

  Impl(ServiceConfig cfg, LinkServiceOptions core_options)
      : config(std::move(cfg)),
        store(StoreOptions{config.store_path, config.compact_after, {}}),
        core(store, std::move(core_options)) {
    // httplib's default adds SO_REUSEPORT, which lets a second server share the port silently.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
  }

  using Handler = std::function<Reply(const httplib::Request&)>;

  void route(const char* method, const std::string& pattern, Handler handler) {
    auto wrapped = [handler = std::move(handler), method](const httplib::Request& req, httplib::Response& res) {
      Reply reply;
      try {
        reply = handler(req);
      } catch (const Error& e) {
        reply = {http_status(e.code()), e.to_json()};
      } catch (const json::exception& e) {
        reply = {400, Error(ErrorCode::MalformedDocument, e.what()).to_json()};
      } catch (const std::exception& e) {
        reply = {500, Error(ErrorCode::IoFailure, e.what()).to_json()};
      }
      res.status = reply.status;
      res.set_content(reply.body.dump(), "application/json");
      spdlog::debug("{} {} -> {}", method, req.path, reply.status);
    };
    const std::string path = std::string(kApiBase) + pattern;
    const std::string_view m = method;
    if (m == "GET") server.Get(path, wrapped);
    else if (m == "POST") server.Post(path, wrapped);
    else if (m == "DELETE") server.Delete(path, wrapped);
  }

  void routes() {
    static const std::string kId = "([0-9a-fA-F-]+)";

    route("GET", "/health", [this](const auto&) {
      return Reply{200, {{"status", "ok"}, {"version", kServiceVersion}, {"store_version", store.version()}}};
    });

    route("POST", "/resources", [this](const auto& req) {
      const auto body = parse_body(req);
      const auto kind = kind_member(body, "kind");
      const auto value = kind == ResourceKind::comment
                             ? codec::optional_string(body, "comment_body").value_or("")
                             : codec::optional_string(body, "locator").value_or("");
      const auto result = core.create_resource(kind, value, codec::optional_string(body, "title"),
                                               codec::optional_string(body, "media_type"));
      return Reply{result.created ? 201 : 200, codec::to_json(result.resource)};
    });
    route("GET", "/resources", [this](const auto& req) {
      auto out = json::array();
      if (req.has_param("locator")) {
        if (const auto r = core.resource_by_locator(req.get_param_value("locator"))) out.push_back(codec::to_json(*r));
      } else {
        for (const auto& [id, r] : store.snapshot()->resources()) out.push_back(codec::to_json(r));
      }
      return Reply{200, out};
    });
    route("GET", "/resources/" + kId, [this](const auto& req) {
      const auto id = path_id(req, ErrorCode::UnknownResource);
      const auto r = core.resource(id);
      if (!r) throw Error(ErrorCode::UnknownResource, "no resource " + id.str(), {{"id", id.str()}});
      return Reply{200, codec::to_json(*r)};
    });

    route("POST", "/selectors", [this](const auto& req) {
      const auto body = parse_body(req);
      const auto s = core.create_selector(codec::parse_id(codec::member(body, "resource_id")),
                                          codec::parse_payload(codec::member(body, "payload")));
      return Reply{201, codec::to_json(s)};
    });
    route("GET", "/selectors/" + kId, [this](const auto& req) {
      const auto id = path_id(req, ErrorCode::UnknownEntity);
      const auto s = core.selector(id);
      if (!s) throw Error(ErrorCode::UnknownEntity, "no selector " + id.str(), {{"id", id.str()}});
      return Reply{200, codec::to_json(*s)};
    });

    route("POST", "/links", [this](const auto& req) {
      const auto body = parse_body(req);
      const auto cls_text = codec::optional_string(body, "annotation_class").value_or("unspecified");
      const auto cls = parse_annotation_class(cls_text);
      if (!cls) throw Error(ErrorCode::InvalidKind, "unknown annotation_class '" + cls_text + "'");
      const auto formality_text = codec::optional_string(body, "formality").value_or("unspecified");
      const auto formality = parse_formality(formality_text);
      if (!formality) throw Error(ErrorCode::InvalidKind, "unknown formality '" + formality_text + "'");
      const auto link =
          core.create_link(endpoints_member(body, "sources"), endpoints_member(body, "targets"), *cls, *formality);
      return Reply{201, codec::to_json(link)};
    });
    route("GET", "/links/" + kId, [this](const auto& req) {
      const auto id = path_id(req, ErrorCode::UnknownLink);
      const auto l = core.link(id);
      if (!l) throw Error(ErrorCode::UnknownLink, "no link " + id.str(), {{"id", id.str()}});
      return Reply{200, codec::to_json(*l)};
    });
    route("DELETE", "/links/" + kId, [this](const auto& req) {
      return Reply{200, codec::to_json(core.delete_link(path_id(req, ErrorCode::UnknownLink)))};
    });

    route("GET", "/documents/" + kId + "/annotations", [this](const auto& req) {
      return Reply{200, codec::to_json(core.annotations_for(path_id(req, ErrorCode::UnknownResource)))};
    });
    route("GET", "/entities/" + kId + "/backlinks", [this](const auto& req) {
      return Reply{200, array_json(core.backlinks_for(path_id(req, ErrorCode::UnknownEntity)))};
    });

    route("POST", "/captures", [this](const auto& req) {
      const auto result = ingest_capture(core, parse_capture(parse_body(req)));
      json out = {{"resource_id", result.resource_id.str()},
                  {"selector_id", result.selector_id ? json(result.selector_id->str()) : json(nullptr)},
                  {"resource_created", result.resource_created}};
      return Reply{201, out};
    });

    route("POST", "/layout", [this](const auto& req) { return Reply{200, layout(parse_body(req))}; });

    route("POST", "/anchors/resolve", [this](const auto& req) {
      const auto body = parse_body(req);
      TextSpan span;
      if (body.contains("selector_id")) {
        const auto id = codec::parse_id(body["selector_id"]);
        const auto s = core.selector(id);
        if (!s) throw Error(ErrorCode::UnknownEntity, "no selector " + id.str(), {{"id", id.str()}});
        const auto* stored = std::get_if<TextSpan>(&s->payload);
        if (!stored) throw Error(ErrorCode::IncompatibleSelectorKind, "only text spans can be re-anchored");
        span = *stored;
      } else {
        auto selector = codec::member(body, "selector");
        if (!selector.contains("type")) selector["type"] = "text_span";
        const auto payload = codec::parse_payload(selector);
        const auto* parsed = std::get_if<TextSpan>(&payload);
        if (!parsed) throw Error(ErrorCode::IncompatibleSelectorKind, "only text spans can be re-anchored");
        span = *parsed;
      }
      const auto& snap = codec::member(body, "snapshot");
      const anchoring::PageTextSnapshot snapshot(static_cast<int>(codec::int_member(snap, "page_index")),
                                                 codec::string_member(snap, "text"));
      return Reply{200, anchor_result_json(anchoring::resolve_text_anchor(span, snapshot))};
    });

    route("GET", "/export", [this](const auto& req) {
      std::optional<EntityId> document;
      if (req.has_param("document")) {
        document = EntityId::parse(req.get_param_value("document"));
        if (!document) throw Error(ErrorCode::UnknownResource, "no resource " + req.get_param_value("document"));
      }
      return Reply{200, interchange::encode(core.export_bundle(document))};
    });
    route("POST", "/import", [this](const auto& req) {
      const auto doc = interchange::decode(parse_body(req));
      const auto result = core.import_bundle(doc);
      json ids = json::object();
      for (const auto& [from, to] : result.id_map) ids[from.str()] = to.str();
      return Reply{200,
                   {{"id_map", std::move(ids)},
                    {"resources_created", result.resources_created},
                    {"resources_reused", result.resources_reused},
                    {"selectors_created", result.selectors_created},
                    {"links_created", result.links_created}}};
    });
  }

  json layout(const json& body) {
    std::vector<presentation::AnchorBox> anchors;
    for (const auto& a : codec::member(body, "anchors")) {
      presentation::AnchorBox box{codec::parse_id(codec::member(a, "selector_id")),
                                  static_cast<int>(codec::int_member(a, "page_index")),
                                  codec::number_member(a, "x"),
                                  codec::number_member(a, "y"),
                                  codec::number_member(a, "w"),
                                  codec::number_member(a, "h")};
      if (box.w <= 0 || box.h <= 0) throw Error(ErrorCode::InvalidPayload, "anchor boxes need positive size");
      anchors.push_back(box);
    }
    std::vector<presentation::WidgetRequest> widgets;
    for (const auto& w : codec::member(body, "widgets")) {
      widgets.push_back({codec::parse_id(codec::member(w, "link_id")),
                         codec::parse_id(codec::member(w, "anchor_selector_id")), codec::number_member(w, "w"),
                         codec::number_member(w, "h")});
    }
    const auto margins = parse_margins(codec::member(body, "margins"));

    std::map<EntityId, int> colors;
    if (const auto it = body.find("colors"); it != body.end() && it->is_object()) {
      for (const auto& [key, index] : it->items()) {
        if (!index.is_number_integer() || index.get<int>() < 0 ||
            index.get<int>() >= static_cast<int>(presentation::kPaletteSize)) {
          throw Error(ErrorCode::InvalidPayload, "palette index out of range");
        }
        colors[codec::parse_id(json(key))] = index.get<int>();
      }
    } else if (body.contains("document_id")) {
      colors = core.annotations_for(codec::parse_id(body["document_id"])).colors;
    } else {
      std::vector<presentation::HighlightPosition> positions;
      for (const auto& a : anchors) positions.push_back({a.selector_id, a.page_index, a.y, a.x});
      colors = presentation::assign_colors(positions);
    }

    auto out = json::array();
    for (const auto& p : presentation::layout_widgets(anchors, widgets, margins, colors)) {
      out.push_back(placement_json(p));
    }
    return out;
  }
};

AnnotationService::AnnotationService(ServiceConfig config, LinkServiceOptions core_options)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(core_options))) {}

AnnotationService::~AnnotationService() { stop(); }

int AnnotationService::bind() {
  auto& cfg = impl_->config;
  if (cfg.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(cfg.host);
    if (impl_->port < 0) throw Error(ErrorCode::BindFailure, "cannot bind " + cfg.host);
  } else {
    if (!impl_->server.bind_to_port(cfg.host, cfg.port)) {
      throw Error(ErrorCode::BindFailure, "cannot bind " + cfg.host + ":" + std::to_string(cfg.port),
                  {{"host", cfg.host}, {"port", cfg.port}});
    }
    impl_->port = cfg.port;
  }
  spdlog::info("xannot service listening on {}:{} (store {})", cfg.host, impl_->port,
               cfg.store_path.empty() ? "<memory>" : cfg.store_path.string());
  return impl_->port;
}

void AnnotationService::run() {
  impl_->in_run = true;
  if (!impl_->stop_requested) impl_->server.listen_after_bind();
  impl_->in_run = false;
}

void AnnotationService::stop() {
  impl_->stop_requested = true;
  while (impl_->in_run && !impl_->server.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  impl_->server.stop();
}

void AnnotationService::shutdown() {
  stop();
  impl_->store.compact();
  spdlog::info("xannot service stopped at store version {}", impl_->store.version());
}

LinkService& AnnotationService::core() { return impl_->core; }

}  // namespace xannot::service
