#include "doctest.h"

#include <cstdlib>
#include <fstream>

#include "ivr/roster_io.hpp"
#include "oracles.hpp"

using namespace ivr;

namespace {
std::string data_dir() {
  const char* d = std::getenv("IVR_DATA");
  return d ? d : "data";
}
}  // namespace

TEST_CASE("adversary json round trip: table kind") {
  Json j = Json::parse(R"({"id":"t","kind":"table","initial_capital":4,
    "wagers":[{"node":"","side":1,"stake":1,"defined_at_stage":0},
              {"node":"1","side":0,"stake":2,"defined_at_stage":7}]})");
  MartingaleTable t = adversary_from_json(j);
  CHECK(t.initial_capital() == 4);
  CHECK(*MartingaleView(t, 0).wager(BinaryString()) == 1);
  CHECK_FALSE(MartingaleView(t, 6).wager(BinaryString::from_text("1")).has_value());
  CHECK(*MartingaleView(t, 7).wager(BinaryString::from_text("1")) == -2);
}

TEST_CASE("adversary json: builtins and nested copycat") {
  Json j = Json::parse(R"({"kind":"builtin","initial_capital":2,
    "builtin":{"name":"doubling","params":{"bit":1}}})");
  MartingaleTable t = adversary_from_json(j);
  CHECK(*limit(t).value(BinaryString::from_text("01")) == 2);

  Json cc = Json::parse(R"({"kind":"builtin","initial_capital":3,
    "builtin":{"name":"copycat","params":{"delay":4,"other":
      {"kind":"builtin","initial_capital":3,
       "builtin":{"name":"bet_on_bit","params":{"bit":1,"stake":1}}}}}})");
  MartingaleTable c = adversary_from_json(cc);
  CHECK_FALSE(c.total_to_length(3, 3));
  CHECK(c.total_to_length(3, 4));
}

TEST_CASE("constraint json") {
  CHECK(constraint_from_json(Json::parse(R"({"kind":"integer"})")).admits(Int(100)));
  auto f = constraint_from_json(Json::parse(R"({"kind":"F","F":[0,2,5]})"));
  CHECK(f.admits(Int(2)));
  CHECK_FALSE(f.admits(Int(3)));
  auto s = constraint_from_json(Json::parse(R"({"kind":"single","a":3})"));
  CHECK(s.admits(Int(3)));
  CHECK(s.admits(Int(0)));
  CHECK_FALSE(s.admits(Int(1)));
  CHECK_THROWS_AS(constraint_from_json(Json::parse(R"({"kind":"weird"})")), ConfigError);
}

TEST_CASE("malformed adversary json is a config error") {
  CHECK_THROWS_AS(adversary_from_json(Json::parse(R"({"kind":"magic"})")), ConfigError);
  CHECK_THROWS_AS(
      adversary_from_json(Json::parse(
          R"({"kind":"table","initial_capital":1,"wagers":[{"node":"","side":2,"stake":1}]})")),
      ConfigError);
  CHECK_THROWS_AS(
      adversary_from_json(Json::parse(
          R"({"kind":"table","initial_capital":1,"wagers":[{"node":"","side":1,"stake":-3}]})")),
      ConfigError);
}

TEST_CASE("engine runners emit headers and replay to identical traces") {
  Json roster = load_json_file(data_dir() + "/roster_lv_two.json");
  VectorSink sink;
  bool ok = false;
  Json report = run_engine_from_json("lv", roster, 100, AuditMode::Strict, sink, &ok);
  CHECK(ok);
  REQUIRE(!sink.lines().empty());
  Json header = Json::parse(sink.lines()[0]);
  CHECK(header["schema_version"] == kTraceSchemaVersion);
  CHECK(header["engine"] == "lv");
  CHECK(header["budget"] == 100);

  // write the trace out, replay it, expect byte-identical events
  std::string path = "/tmp/ivr_test_lv_trace.jsonl";
  {
    std::ofstream out(path);
    for (const auto& line : sink.lines()) out << line << "\n";
  }
  ReplayResult rr = replay_trace(path);
  CHECK(rr.identical);
  CHECK(rr.audits_ok);
  CHECK(rr.message == "identical, audits pass");
}

TEST_CASE("replay detects a corrupted wager event") {
  Json roster = load_json_file(data_dir() + "/roster_anc_identity.json");
  VectorSink sink;
  bool ok = false;
  run_engine_from_json("anc", roster, 30, AuditMode::Strict, sink, &ok);
  CHECK(ok);
  auto lines = sink.lines();
  size_t corrupt = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find("\"bet\"") != std::string::npos) {
      corrupt = i;
      break;
    }
  }
  REQUIRE(corrupt > 0);
  auto ev = Json::parse(lines[corrupt]);
  ev["payload"]["tau"] = "101010";
  lines[corrupt] = ev.dump();
  std::string path = "/tmp/ivr_test_anc_corrupt.jsonl";
  {
    std::ofstream out(path);
    for (const auto& line : lines) out << line << "\n";
  }
  ReplayResult rr = replay_trace(path);
  CHECK_FALSE(rr.identical);
  CHECK(rr.divergence_line == corrupt + 1);
}

TEST_CASE("trace schema version gates replay") {
  std::string path = "/tmp/ivr_test_badschema.jsonl";
  {
    std::ofstream out(path);
    out << R"({"schema_version":999,"engine":"fi","budget":1,"roster":{"adversaries":[]}})"
        << "\n";
  }
  CHECK_THROWS_AS(replay_trace(path), ConfigError);
}

TEST_CASE("the regression roster loads and its tables validate") {
  Json roster = load_json_file(data_dir() + "/roster_fi_regression.json");
  FiRosterSpec spec = load_fi_roster(roster);
  REQUIRE(spec.adversaries.size() == 3);
  for (const auto& adv : spec.adversaries) {
    auto rep = validate(limit(adv), ValueConstraint::integer(), 8);
    CHECK(rep.valid());
  }
  // the late-arrival table is total to depth 12 only once stage 50 comes
  CHECK_FALSE(spec.adversaries[1].total_to_length(3, 49));
  CHECK(spec.adversaries[1].total_to_length(12, 50));
  CHECK_FALSE(spec.adversaries[1].total_to_length(13, 50));
  // the parity table converges to depth 12 and no further
  CHECK(spec.adversaries[2].total_to_length(12, 0));
  CHECK_FALSE(spec.adversaries[2].total_to_length(13, 0));
}
