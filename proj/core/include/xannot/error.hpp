/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace xannot {

enum class ErrorCode {
  EmptyBody,
  EmptyLocator,
  InvalidKind,
  UnknownResource,
  IncompatibleSelectorKind,
  InvalidPayload,
  DanglingEndpoint,
  EmptySources,
  EmptyTargets,
  SelfReference,
  UnknownLink,
  UnknownEntity,
  NotADocument,
  PageMismatch,
  DuplicateSelectorId,
  WidgetTooWide,
  UnknownAnchor,
  MarginOverflow,
  IntegrityViolation,
  IoFailure,
  MalformedDocument,
  VersionUnsupported,
  BindFailure,
  StoreLocked,
};

/// Wire name of an error code, e.g. "DanglingEndpoint".
std::string_view to_string(ErrorCode code);

/// Every failure of a core operation surfaces as this exception. The code is
/// the stable, programmatic part; details carry structured context for clients.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

  /// {code, message, details}
  nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

}  // namespace xannot
