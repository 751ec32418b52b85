/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "xannot/error.hpp"
#include "xannot/rsl.hpp"

namespace xannot::service {

inline constexpr std::string_view kApiBase = "/api/v1";
inline constexpr std::string_view kServiceVersion = "0.1.0";

/// Message from an external application (or a reader panel) describing a
/// selected media fragment.
struct CapturePayload {
  std::string source_app;
  ResourceKind kind = ResourceKind::web_page;
  std::string locator;
  std::optional<std::string> title;
  std::optional<std::string> media_type;
  std::optional<SelectorPayload> selection;  // absent: the whole resource is the drop target
  std::optional<std::int64_t> captured_at;
};

CapturePayload parse_capture(const nlohmann::json& value);
nlohmann::json to_json(const CapturePayload& payload);

struct CaptureResult {
  EntityId resource_id;
  std::optional<EntityId> selector_id;
  bool resource_created = false;
};

/// Throws Error{InvalidPayload} or Error{IncompatibleSelectorKind}.
CaptureResult ingest_capture(LinkService& core, const CapturePayload& payload);

/// HTTP status for an error code.
int http_status(ErrorCode code);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds any free port
  std::filesystem::path store_path;
  std::size_t compact_after = 256;
};

/// REST front end over LinkService, anchoring and presentation under /api/v1.
class AnnotationService {
 public:
  /// Opens the store; throws Error{StoreLocked} if another process holds it.
  explicit AnnotationService(ServiceConfig config, LinkServiceOptions core_options = {});
  ~AnnotationService();

  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  /// Returns the bound port. Throws Error{BindFailure}.
  int bind();
  /// Serves until stop(); bind() first.
  void run();
  void stop();
  /// Stops serving and compacts the store.
  void shutdown();

  LinkService& core();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace xannot::service
