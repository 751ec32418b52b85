/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "xannot/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

#include "xannot/text.hpp"

namespace xannot {

namespace {

constexpr double kCoordinateSlack = 1e-9;

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

void check_context(std::vector<Violation>& out, const std::string& quote,
                   const std::string& prefix, const std::string& suffix) {
  if (quote.empty()) out.push_back({"empty_quote", "exact_quote is empty"});
  for (const auto* field : {&quote, &prefix, &suffix}) {
    if (!text::is_valid_utf8(*field)) out.push_back({"invalid_text", "selector text is not valid UTF-8"});
  }
  if (text::length(prefix) > kMaxContextLength) out.push_back({"context_too_long", "prefix longer than 64 characters"});
  if (text::length(suffix) > kMaxContextLength) out.push_back({"context_too_long", "suffix longer than 64 characters"});
}

struct PayloadChecker {
  std::vector<Violation>& out;

  void operator()(const TextSpan& span) const {
    if (span.page_index < 0) out.push_back({"page_out_of_range", "page_index is negative"});
    if (span.char_start < 0) out.push_back({"invalid_range", "char_start is negative"});
    if (span.char_start >= span.char_end) out.push_back({"invalid_range", "char_start must be below char_end"});
    check_context(out, span.exact_quote, span.prefix, span.suffix);
  }

  void operator()(const PageRegion& r) const {
    if (r.page_index < 0) out.push_back({"page_out_of_range", "page_index is negative"});
    for (const double v : {r.x, r.y, r.w, r.h}) {
      if (!std::isfinite(v)) {
        out.push_back({"coordinates_out_of_range", "region coordinate is not finite"});
        return;
      }
    }
    if (r.x < 0 || r.x > 1 || r.y < 0 || r.y > 1) out.push_back({"coordinates_out_of_range", "region origin outside [0,1]"});
    if (r.w <= 0 || r.h <= 0) out.push_back({"invalid_size", "region width and height must be positive"});
    if (r.x + r.w > 1 + kCoordinateSlack) out.push_back({"coordinates_out_of_range", "x+w exceeds 1"});
    if (r.y + r.h > 1 + kCoordinateSlack) out.push_back({"coordinates_out_of_range", "y+h exceeds 1"});
  }

  void operator()(const TimeSegment& t) const {
    if (t.start_ms < 0) out.push_back({"invalid_range", "start_ms is negative"});
    if (t.start_ms >= t.end_ms) out.push_back({"invalid_range", "start_ms must be below end_ms"});
  }

  void operator()(const WebFragment& f) const {
    check_context(out, f.exact_quote, f.prefix, f.suffix);
    if (f.element_path) {
      static const std::regex kPath(R"((/[A-Za-z][A-Za-z0-9_.:-]*\[[1-9][0-9]*\])+)");
      if (!std::regex_match(*f.element_path, kPath))
        out.push_back({"invalid_element_path", "element_path must look like /html[1]/body[1]/p[2]"});
    }
  }
};

std::string normalize_quote(const std::string& quote) { return text::normalize(quote); }

}  // namespace

std::string_view to_string(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::pdf_document: return "pdf_document";
    case ResourceKind::web_page: return "web_page";
    case ResourceKind::video: return "video";
    case ResourceKind::audio: return "audio";
    case ResourceKind::image: return "image";
    case ResourceKind::comment: return "comment";
  }
  return "unknown";
}

std::string_view to_string(AnnotationClass value) {
  switch (value) {
    case AnnotationClass::comment: return "comment";
    case AnnotationClass::explanation: return "explanation";
    case AnnotationClass::example: return "example";
    case AnnotationClass::unspecified: return "unspecified";
  }
  return "unknown";
}

std::string_view to_string(Formality value) {
  switch (value) {
    case Formality::formal: return "formal";
    case Formality::informal: return "informal";
    case Formality::unspecified: return "unspecified";
  }
  return "unknown";
}

std::optional<ResourceKind> parse_resource_kind(std::string_view text) {
  for (auto kind : {ResourceKind::pdf_document, ResourceKind::web_page, ResourceKind::video,
                    ResourceKind::audio, ResourceKind::image, ResourceKind::comment}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::optional<AnnotationClass> parse_annotation_class(std::string_view text) {
  for (auto value : {AnnotationClass::comment, AnnotationClass::explanation,
                     AnnotationClass::example, AnnotationClass::unspecified}) {
    if (to_string(value) == text) return value;
  }
  return std::nullopt;
}

std::optional<Formality> parse_formality(std::string_view text) {
  for (auto value : {Formality::formal, Formality::informal, Formality::unspecified}) {
    if (to_string(value) == text) return value;
  }
  return std::nullopt;
}

std::string_view payload_type_name(const SelectorPayload& payload) {
  struct Name {
    std::string_view operator()(const TextSpan&) const { return "text_span"; }
    std::string_view operator()(const PageRegion&) const { return "page_region"; }
    std::string_view operator()(const TimeSegment&) const { return "time_segment"; }
    std::string_view operator()(const WebFragment&) const { return "web_fragment"; }
  };
  return std::visit(Name{}, payload);
}

std::vector<Violation> resource_violations(const Resource& resource) {
  std::vector<Violation> out;
  if (resource.kind == ResourceKind::comment) {
    if (!resource.comment_body || blank(*resource.comment_body))
      out.push_back({"empty_body", "comment resource needs a non-empty comment_body"});
    if (resource.locator) out.push_back({"unexpected_locator", "comment resource must not have a locator"});
  } else {
    if (!resource.locator || resource.locator->empty())
      out.push_back({"empty_locator", "resource needs a non-empty locator"});
    if (resource.comment_body) out.push_back({"unexpected_body", "only comment resources carry a comment_body"});
  }
  for (const auto* field :
       {&resource.locator, &resource.title, &resource.media_type, &resource.comment_body}) {
    if (*field && !text::is_valid_utf8(**field)) out.push_back({"invalid_text", "resource text is not valid UTF-8"});
  }
  return out;
}

std::vector<Violation> payload_violations(const SelectorPayload& payload) {
  std::vector<Violation> out;
  std::visit(PayloadChecker{out}, payload);
  return out;
}

bool payload_compatible(ResourceKind kind, const SelectorPayload& payload) {
  switch (kind) {
    case ResourceKind::pdf_document:
      return std::holds_alternative<TextSpan>(payload) || std::holds_alternative<PageRegion>(payload);
    case ResourceKind::video:
    case ResourceKind::audio:
      return std::holds_alternative<TimeSegment>(payload);
    case ResourceKind::web_page:
      return std::holds_alternative<WebFragment>(payload);
    case ResourceKind::image:
    case ResourceKind::comment:
      return false;
  }
  return false;
}

std::vector<Violation> link_shape_violations(const Link& link) {
  std::vector<Violation> out;
  if (link.sources.empty()) out.push_back({"empty_sources", "link has no sources"});
  if (link.targets.empty()) out.push_back({"empty_targets", "link has no targets"});
  for (const auto& source : link.sources) {
    if (std::find(link.targets.begin(), link.targets.end(), source) != link.targets.end()) {
      out.push_back({"self_reference", "endpoint " + source.id.str() + " is both source and target"});
    }
  }
  return out;
}

SelectorPayload normalize_payload(SelectorPayload payload) {
  auto fix = [](std::string& quote, std::string& prefix, std::string& suffix) {
    if (!text::is_valid_utf8(quote) || !text::is_valid_utf8(prefix) || !text::is_valid_utf8(suffix))
      return;  // left for payload_violations to report
    quote = normalize_quote(quote);
    prefix = text::tail(text::normalize(prefix), kMaxContextLength);
    suffix = text::head(text::normalize(suffix), kMaxContextLength);
  };
  if (auto* span = std::get_if<TextSpan>(&payload)) fix(span->exact_quote, span->prefix, span->suffix);
  if (auto* web = std::get_if<WebFragment>(&payload)) fix(web->exact_quote, web->prefix, web->suffix);
  return payload;
}

}  // namespace xannot
