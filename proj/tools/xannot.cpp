/*
 * SPDX-License-Identifier: Apache-2.0
 */
// xannot: operator tool for the annotation store and service.

#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "httplib.h"
#include "xannot/codec.hpp"
#include "xannot/interchange.hpp"
#include "xannot/rsl.hpp"
#include "xannot/service.hpp"
#include "xannot/store.hpp"

namespace {

using json = nlohmann::json;
using xannot::Error;
using xannot::ErrorCode;

struct Globals {
  std::string store;
  std::string log_level = "info";
  bool json_output = false;
};

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

xannot::StoreOptions store_options(const Globals& g) {
  if (g.store.empty()) throw Error(ErrorCode::IoFailure, "no store path (use --store or XANNOT_STORE)");
  return {g.store, 256, {}};
}

std::string optional_text(const std::optional<std::string>& value) { return value.value_or("-"); }

std::string endpoint_text(const xannot::Endpoint& e) {
  return (e.kind == xannot::Endpoint::Kind::resource ? "resource:" : "selector:") + e.id.str();
}

std::string endpoints_text(const std::vector<xannot::Endpoint>& endpoints) {
  std::string out;
  for (const auto& e : endpoints) out += (out.empty() ? "" : ",") + endpoint_text(e);
  return out;
}

int cmd_validate(const Globals& g) {
  xannot::Store store(store_options(g));
  const auto report = store.check_integrity();
  if (g.json_output) {
    std::cout << report.to_json().dump() << "\n";
  } else if (report.ok) {
    std::cout << "ok\n";
  } else {
    const auto print = [](const char* label, const std::vector<xannot::IntegrityIssue>& issues) {
      for (const auto& i : issues) std::cout << label << "\t" << i.subject.str() << "\t" << i.detail << "\n";
    };
    print("dangling_endpoint", report.dangling_endpoints);
    print("orphan_selector", report.orphan_selectors);
    print("kind_violation", report.kind_violations);
  }
  if (!report.ok) std::cerr << "error: " << xannot::to_string(ErrorCode::IntegrityViolation) << "\n";
  return report.ok ? 0 : 1;
}

int cmd_export(const Globals& g, const std::string& out, const std::string& document) {
  xannot::Store store(store_options(g));
  xannot::LinkService core(store);
  std::optional<xannot::EntityId> doc;
  if (!document.empty()) {
    doc = xannot::EntityId::parse(document);
    if (!doc) throw Error(ErrorCode::UnknownResource, "no resource " + document);
  }
  const auto text = xannot::interchange::serialize(xannot::interchange::encode(core.export_bundle(doc)));
  if (out.empty() || out == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  file << text;
  if (!file.flush()) throw Error(ErrorCode::IoFailure, "cannot write " + out);
  spdlog::info("exported to {}", out);
  return 0;
}

int cmd_import(const Globals& g, const std::string& in) {
  std::ifstream file(in, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoFailure, "cannot read " + in);
  const auto value = json::parse(file, nullptr, false);
  if (value.is_discarded()) throw Error(ErrorCode::MalformedDocument, in + " is not valid JSON");
  const auto doc = xannot::interchange::decode(value);

  xannot::Store store(store_options(g));
  xannot::LinkService core(store);
  const auto r = core.import_bundle(doc);
  if (g.json_output) {
    std::cout << json{{"resources_created", r.resources_created},
                      {"resources_reused", r.resources_reused},
                      {"selectors_created", r.selectors_created},
                      {"links_created", r.links_created}}
                     .dump()
              << "\n";
  } else {
    std::cout << "resources_created " << r.resources_created << "\n"
              << "resources_reused " << r.resources_reused << "\n"
              << "selectors_created " << r.selectors_created << "\n"
              << "links_created " << r.links_created << "\n";
  }
  return 0;
}

int cmd_list(const Globals& g, const std::string& what) {
  xannot::Store store(store_options(g));
  const auto graph = store.snapshot();
  const bool resources = what == "all" || what == "resources";
  const bool selectors = what == "all" || what == "selectors";
  const bool links = what == "all" || what == "links";

  if (g.json_output) {
    if (resources)
      for (const auto& [id, r] : graph->resources()) std::cout << xannot::codec::to_json(r).dump() << "\n";
    if (selectors)
      for (const auto& [id, s] : graph->selectors()) std::cout << xannot::codec::to_json(s).dump() << "\n";
    if (links)
      for (const auto& [id, l] : graph->links()) std::cout << xannot::codec::to_json(l).dump() << "\n";
    return 0;
  }
  if (resources) {
    for (const auto& [id, r] : graph->resources()) {
      std::cout << "resource\t" << id.str() << "\t" << xannot::to_string(r.kind) << "\t"
                << (r.kind == xannot::ResourceKind::comment ? optional_text(r.comment_body) : optional_text(r.locator))
                << "\t" << optional_text(r.title) << "\n";
    }
  }
  if (selectors) {
    for (const auto& [id, s] : graph->selectors()) {
      std::cout << "selector\t" << id.str() << "\t" << xannot::payload_type_name(s.payload) << "\t"
                << s.resource_id.str() << (graph->is_pending(id) ? "\tpending" : "") << "\n";
    }
  }
  if (links) {
    for (const auto& [id, l] : graph->links()) {
      std::cout << "link\t" << id.str() << "\t" << xannot::to_string(l.annotation_class) << "\t"
                << endpoints_text(l.sources) << "\t" << endpoints_text(l.targets) << "\n";
    }
  }
  return 0;
}

int cmd_serve(const Globals& g, const std::string& host, int port) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  xannot::service::ServiceConfig config;
  config.host = host;
  config.port = port;
  config.store_path = store_options(g).path;
  xannot::service::AnnotationService service(config);
  const int bound = service.bind();
  std::cout << "listening " << host << ":" << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {}, shutting down", sig);
    service.stop();
  });
  service.run();
  pthread_kill(waiter.native_handle(), SIGTERM);  // harmless if the waiter already returned
  waiter.join();
  service.shutdown();
  return 0;
}

struct CaptureFlags {
  std::string url;
  std::string source_app = "xannot-cli";
  std::string kind;
  std::string locator;
  std::string title;
  std::string media_type;
  std::optional<int> page;
  std::optional<std::int64_t> char_start, char_end;
  std::optional<double> x, y, w, h;
  std::optional<std::int64_t> start_ms, end_ms;
  std::string quote, prefix, suffix, element_path;
  bool print_only = false;
};

xannot::service::CapturePayload build_capture(const CaptureFlags& f) {
  xannot::service::CapturePayload p;
  const auto kind = xannot::parse_resource_kind(f.kind);
  if (!kind) throw Error(ErrorCode::InvalidKind, "unknown resource kind '" + f.kind + "'");
  p.kind = *kind;
  p.source_app = f.source_app;
  p.locator = f.locator;
  if (!f.title.empty()) p.title = f.title;
  if (!f.media_type.empty()) p.media_type = f.media_type;

  if (f.start_ms || f.end_ms) {
    p.selection = xannot::TimeSegment{f.start_ms.value_or(0), f.end_ms.value_or(0)};
  } else if (f.x || f.y || f.w || f.h) {
    p.selection = xannot::PageRegion{f.page.value_or(0), f.x.value_or(0), f.y.value_or(0), f.w.value_or(0),
                                     f.h.value_or(0)};
  } else if (f.char_start || f.char_end) {
    p.selection = xannot::TextSpan{f.page.value_or(0), f.char_start.value_or(0), f.char_end.value_or(0),
                                   f.quote, f.prefix, f.suffix};
  } else if (!f.quote.empty()) {
    xannot::WebFragment fragment{f.quote, f.prefix, f.suffix, std::nullopt};
    if (!f.element_path.empty()) fragment.element_path = f.element_path;
    p.selection = fragment;
  }
  return p;
}

int cmd_capture_send(const Globals& g, const CaptureFlags& f) {
  const auto body = xannot::service::to_json(build_capture(f));
  if (f.print_only) {
    std::cout << body.dump() << "\n";
    return 0;
  }
  httplib::Client client(f.url);
  const auto res = client.Post(std::string(xannot::service::kApiBase) + "/captures", body.dump(), "application/json");
  if (!res) throw Error(ErrorCode::IoFailure, "service unreachable at " + f.url + ": " + httplib::to_string(res.error()));
  const auto reply = json::parse(res->body, nullptr, false);
  if (res->status >= 300) {
    const auto code = reply.is_object() ? reply.value("code", "IoFailure") : "IoFailure";
    const auto message = reply.is_object() ? reply.value("message", res->body) : res->body;
    std::cerr << "error: " << code << ": " << message << "\n";
    return 1;
  }
  if (g.json_output) {
    std::cout << reply.dump() << "\n";
  } else {
    std::cout << "resource_id " << reply.at("resource_id").get<std::string>() << "\n";
    if (reply.at("selector_id").is_string()) {
      std::cout << "selector_id " << reply.at("selector_id").get<std::string>() << "\n";
    }
    std::cout << "resource_created " << (reply.at("resource_created").get<bool>() ? "true" : "false") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-media annotation store and service"};
  app.require_subcommand(1);

  Globals g;
  g.store = env_or("XANNOT_STORE", "");
  app.add_option("--store", g.store, "Store file (env XANNOT_STORE)");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")->capture_default_str();
  app.add_flag("--json", g.json_output, "Emit JSON records instead of tables");

  std::string host = "127.0.0.1";
  int port = std::stoi(env_or("XANNOT_PORT", "8080"));
  auto* serve = app.add_subcommand("serve", "Run the REST service");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port, "0 picks a free port (env XANNOT_PORT)")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check store integrity; exit 0 iff ok");

  std::string out, document;
  auto* exp = app.add_subcommand("export", "Write an .xannot.json bundle");
  exp->add_option("--out", out, "Output file, '-' for stdout");
  exp->add_option("--document", document, "Export only the bundle of this document");

  std::string in;
  auto* imp = app.add_subcommand("import", "Merge an .xannot.json bundle into the store");
  imp->add_option("file", in)->required();

  std::string what = "all";
  auto* list = app.add_subcommand("list", "Print resources, selectors and links");
  list->add_option("what", what)->check(CLI::IsMember({"all", "resources", "selectors", "links"}));

  CaptureFlags cf;
  cf.url = "http://127.0.0.1:" + env_or("XANNOT_PORT", "8080");
  auto* capture = app.add_subcommand("capture-send", "Post a synthetic capture payload to a running service");
  capture->add_option("--url", cf.url)->capture_default_str();
  capture->add_option("--source-app", cf.source_app)->capture_default_str();
  capture->add_option("--kind", cf.kind)->required();
  capture->add_option("--locator", cf.locator)->required();
  capture->add_option("--title", cf.title);
  capture->add_option("--media-type", cf.media_type);
  capture->add_option("--page", cf.page);
  capture->add_option("--char-start", cf.char_start);
  capture->add_option("--char-end", cf.char_end);
  capture->add_option("--region-x", cf.x);
  capture->add_option("--region-y", cf.y);
  capture->add_option("--region-w", cf.w);
  capture->add_option("--region-h", cf.h);
  capture->add_option("--start-ms", cf.start_ms);
  capture->add_option("--end-ms", cf.end_ms);
  capture->add_option("--quote", cf.quote);
  capture->add_option("--prefix", cf.prefix);
  capture->add_option("--suffix", cf.suffix);
  capture->add_option("--element-path", cf.element_path);
  capture->add_flag("--print", cf.print_only, "Print the payload instead of sending it");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_default_logger(spdlog::stderr_color_mt("xannot"));
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  try {
    if (*serve) return cmd_serve(g, host, port);
    if (*validate) return cmd_validate(g);
    if (*exp) return cmd_export(g, out, document);
    if (*imp) return cmd_import(g, in);
    if (*list) return cmd_list(g, what);
    if (*capture) return cmd_capture_send(g, cf);
  } catch (const Error& e) {
    std::cerr << "error: " << xannot::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
