#include <gtest/gtest.h>

#include <json.hpp>

#include "adqec/code_io.hpp"
#include "adqec/seesaw.hpp"
#include "support.hpp"

using namespace adqec;
using nlohmann::json;

namespace {

void expect_identical(const ChoiOperator& a, const ChoiOperator& b) {
  EXPECT_EQ(a.in_dims, b.in_dims);
  EXPECT_EQ(a.out_dims, b.out_dims);
  ASSERT_EQ(a.matrix.rows(), b.matrix.rows());
  EXPECT_TRUE((a.matrix.array() == b.matrix.array()).all());
}

void expect_identical(const StrategicCode& a, const StrategicCode& b) {
  expect_identical(a.encoder, b.encoder);
  ASSERT_EQ(a.rounds.size(), b.rounds.size());
  EXPECT_EQ(a.outcome_counts, b.outcome_counts);
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    ASSERT_EQ(a.rounds[r].size(), b.rounds[r].size());
    for (std::size_t i = 0; i < a.rounds[r].size(); ++i) expect_identical(a.rounds[r][i], b.rounds[r][i]);
  }
  ASSERT_EQ(a.decoders.size(), b.decoders.size());
  for (std::size_t i = 0; i < a.decoders.size(); ++i) expect_identical(a.decoders[i], b.decoders[i]);
}

}  // namespace

TEST(CodeIo, IdentityCodeRoundTrips) {
  const auto code = identity_code(2);
  const auto doc = parse_code(to_json(code));
  EXPECT_FALSE(doc.is_static);
  EXPECT_TRUE(doc.warnings.empty());
  expect_identical(doc.code, code);
}

TEST(CodeIo, RandomComplexEntriesRoundTripExactly) {
  Rng rng(4);
  for (int m : {1, 2, 3}) {
    const auto code = adqec::testing::random_code(rng, 2, m);
    expect_identical(parse_code(to_json(code, -1)).code, code);
  }
}

TEST(CodeIo, SeesawOutputRoundTrips) {
  SeesawConfig c;
  c.restarts = 1;
  c.max_iters = 5;
  const auto run = seesaw_single_check(local_k_noise(2, 1, 0.2), 2, 2, c);
  const auto back = parse_code(to_json(run.code)).code;
  expect_identical(back, run.code);
  const json j = json::parse(to_json(run.code));
  EXPECT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["decoders"].size(), 2u);
}

TEST(CodeIo, TwoRoundCodeKeepsRoundStructure) {
  Rng rng(6);
  const auto code = initial_code(rng, 1, {2, 2}, InitStrategy::RandomIsometry);
  const auto back = parse_code(to_json(code)).code;
  expect_identical(back, code);
  EXPECT_EQ(back.rounds[1].size(), 4u);
}

TEST(CodeIo, StaticRoundTrips) {
  const StaticCode code{leung_4qubit_encoder(), depolarizing_channel(qubit_dims(4), {2})};
  const auto doc = parse_code(to_json(code));
  ASSERT_TRUE(doc.is_static);
  const auto back = doc.as_static();
  expect_identical(back.encoder, code.encoder);
  expect_identical(back.decoder, code.decoder);
  EXPECT_EQ(json::parse(to_json(code))["kind"], "static");
}

TEST(CodeIo, SchemaFields) {
  const json j = json::parse(to_json(protocol_2qubit()));
  for (const char* key : {"kind", "dims", "encoder", "checks", "decoders"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["dims"]["logical"], json({2}));
  EXPECT_EQ(j["dims"]["physical"], json({2, 2}));
  const auto& enc = j["encoder"];
  EXPECT_EQ(enc["rows"], 8);
  EXPECT_EQ(enc["data"].size(), 64u);
  EXPECT_EQ(enc["data"][0].size(), 2u);
}

TEST(CodeIo, RejectsDimsProductMismatch) {
  json j = json::parse(to_json(identity_code(1)));
  j["encoder"]["out_dims"] = {3};
  EXPECT_THROW(parse_code(j.dump()), FormatError);
  j = json::parse(to_json(identity_code(1)));
  j["encoder"]["rows"] = 5;
  EXPECT_THROW(parse_code(j.dump()), FormatError);
}

TEST(CodeIo, RejectsMalformedDocuments) {
  EXPECT_THROW(parse_code("{not json"), FormatError);
  EXPECT_THROW(parse_code("{}"), FormatError);
  json j = json::parse(to_json(identity_code(1)));
  j["kind"] = "dynamic";
  EXPECT_THROW(parse_code(j.dump()), FormatError);
  j = json::parse(to_json(identity_code(1)));
  j["decoders"].push_back(j["decoders"][0]);
  EXPECT_THROW(parse_code(j.dump()), FormatError);
  j = json::parse(to_json(identity_code(1)));
  j["encoder"]["data"][0] = {1.0};
  EXPECT_THROW(parse_code(j.dump()), FormatError);
  j = json::parse(to_json(identity_code(1)));
  j["checks"][0]["round"] = 3;
  EXPECT_THROW(parse_code(j.dump()), FormatError);
}

TEST(CodeIo, NonPsdPayloadOnlyWarns) {
  json j = json::parse(to_json(identity_code(1)));
  j["decoders"][0]["data"][0] = {-1.0, 0.0};
  const auto doc = parse_code(j.dump());
  ASSERT_EQ(doc.warnings.size(), 1u);
  EXPECT_NE(doc.warnings[0].find("decoders[0]"), std::string::npos);
}

TEST(CodeIo, DecoderListRoundTrips) {
  const auto code = protocol_2qubit();
  const auto back = parse_decoders(decoders_to_json(code.decoders));
  ASSERT_EQ(back.size(), code.decoders.size());
  for (std::size_t i = 0; i < back.size(); ++i) expect_identical(back[i], code.decoders[i]);
}
