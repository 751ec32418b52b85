/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include "support.hpp"
#include "xannot/codec.hpp"
#include "xannot/error.hpp"

namespace xannot {
namespace {

using json = nlohmann::json;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoFailure;
}

TEST(EntityIdText, ParsesAndPrintsCanonicalForm) {
  const EntityId id(0x0123456789abcdefULL, 0xfedcba9876543210ULL);
  EXPECT_EQ(id.str(), "01234567-89ab-cdef-fedc-ba9876543210");
  EXPECT_EQ(EntityId::parse(id.str()), id);
  EXPECT_EQ(EntityId::parse("01234567-89AB-CDEF-FEDC-BA9876543210"), id);
  EXPECT_EQ(EntityId::parse("0123456789abcdeffedcba9876543210"), std::nullopt);
  EXPECT_EQ(EntityId::parse("01234567-89ab-cdef-fedc-ba987654321g"), std::nullopt);
}

TEST(EntityIdText, RandomIdsDoNotCollide) {
  std::set<EntityId> seen;
  for (int i = 0; i < 10'000; ++i) EXPECT_TRUE(seen.insert(EntityId::random()).second);
}

TEST(Codec, PayloadVariantsRoundTrip) {
  testing::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    for (auto kind : {ResourceKind::pdf_document, ResourceKind::web_page, ResourceKind::video}) {
      const auto p = *testing::random_payload(rng, kind);
      EXPECT_EQ(codec::parse_payload(codec::to_json(p)), p);
    }
  }
}

TEST(Codec, EntitiesRoundTrip) {
  const Resource r{EntityId(1, 2), ResourceKind::web_page, "https://example.org/memex", "Memex", "text/html",
                   std::nullopt, 1234};
  EXPECT_EQ(codec::parse_resource(codec::to_json(r)), r);
  const Selector s{EntityId(1, 3), r.id, WebFragment{"q", "p", "s", "/html[1]"}, 99};
  EXPECT_EQ(codec::parse_selector(codec::to_json(s)), s);
  const Link l{EntityId(1, 4), {Endpoint::selector(s.id)}, {Endpoint::resource(r.id)},
               AnnotationClass::example, Formality::formal, 7};
  EXPECT_EQ(codec::parse_link(codec::to_json(l)), l);
}

TEST(Codec, OmitsAbsentOptionals) {
  const Resource r{EntityId(1, 2), ResourceKind::comment, std::nullopt, std::nullopt, std::nullopt, "hi", 5};
  const auto j = codec::to_json(r);
  EXPECT_FALSE(j.contains("locator"));
  EXPECT_FALSE(j.contains("title"));
  EXPECT_EQ(j.at("comment_body"), "hi");
  EXPECT_EQ(j.at("created_at"), 5);
}

TEST(Codec, EndpointWireShape) {
  const auto j = codec::to_json(Endpoint::resource(EntityId(0, 1)));
  EXPECT_EQ(j, (json{{"kind", "resource"}, {"id", "00000000-0000-0000-0000-000000000001"}}));
}

TEST(Codec, LinkDefaultsClassification) {
  const auto l = codec::parse_link(json{{"id", EntityId(0, 9).str()},
                                        {"sources", {{{"kind", "selector"}, {"id", EntityId(0, 1).str()}}}},
                                        {"targets", {{{"kind", "resource"}, {"id", EntityId(0, 2).str()}}}},
                                        {"created_at", 0}});
  EXPECT_EQ(l.annotation_class, AnnotationClass::unspecified);
  EXPECT_EQ(l.formality, Formality::unspecified);
}

TEST(Codec, ShapeErrors) {
  EXPECT_EQ(code_of([] { codec::parse_payload(json{{"type", "polygon"}}); }), ErrorCode::MalformedDocument);
  EXPECT_EQ(code_of([] { codec::parse_payload(json{{"type", "time_segment"}, {"start_ms", "0"}}); }),
            ErrorCode::MalformedDocument);
  EXPECT_EQ(code_of([] { codec::parse_id(json("nope")); }), ErrorCode::MalformedDocument);
  EXPECT_EQ(code_of([] {
              codec::parse_resource(json{{"id", EntityId(0, 1).str()}, {"kind", "book"}, {"created_at", 0}});
            }),
            ErrorCode::InvalidKind);
}

}  // namespace
}  // namespace xannot
