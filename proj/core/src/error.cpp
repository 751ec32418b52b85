/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/error.hpp"

namespace xannot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyBody: return "EmptyBody";
    case ErrorCode::EmptyLocator: return "EmptyLocator";
    case ErrorCode::InvalidKind: return "InvalidKind";
    case ErrorCode::UnknownResource: return "UnknownResource";
    case ErrorCode::IncompatibleSelectorKind: return "IncompatibleSelectorKind";
    case ErrorCode::InvalidPayload: return "InvalidPayload";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::EmptySources: return "EmptySources";
    case ErrorCode::EmptyTargets: return "EmptyTargets";
    case ErrorCode::SelfReference: return "SelfReference";
    case ErrorCode::UnknownLink: return "UnknownLink";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::NotADocument: return "NotADocument";
    case ErrorCode::PageMismatch: return "PageMismatch";
    case ErrorCode::DuplicateSelectorId: return "DuplicateSelectorId";
    case ErrorCode::WidgetTooWide: return "WidgetTooWide";
    case ErrorCode::UnknownAnchor: return "UnknownAnchor";
    case ErrorCode::MarginOverflow: return "MarginOverflow";
    case ErrorCode::IntegrityViolation: return "IntegrityViolation";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::StoreLocked: return "StoreLocked";
  }
  return "Unknown";
}

nlohmann::json Error::to_json() const {
  return {{"code", std::string(to_string(code_))}, {"message", what()}, {"details", details_}};
}

}  // namespace xannot
