// Command-line front end: config loading, engine dispatch, trace emission,
// and invariant-audit reporting.
//
// Exit codes: 0 success with audits passing, 1 audit failure or engine
// fault, 2 usage/config error.

#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "ivr/forcing.hpp"
#include "ivr/levels.hpp"
#include "ivr/roster_io.hpp"
#include "ivr/search.hpp"

namespace {

using namespace ivr;

std::vector<Int> parse_capitals(const std::string& csv) {
  std::vector<Int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.emplace_back(item);
  }
  if (out.empty()) throw ConfigError("--capitals needs at least one value");
  return out;
}

std::unique_ptr<TraceSink> make_sink(const std::string& out_path) {
  if (out_path.empty()) return std::make_unique<NullSink>();
  return std::make_unique<JsonlWriter>(out_path);
}

int cmd_validate(const std::string& path, size_t depth) {
  Json j = load_json_file(path);
  MartingaleTable table = adversary_from_json(j);
  ValueConstraint constraint = j.contains("constraint")
                                   ? constraint_from_json(j.at("constraint"))
                                   : ValueConstraint::integer();
  ValidationReport rep = validate(limit(table), constraint, depth);
  Json out;
  out["valid"] = rep.valid();
  Json v = Json::array();
  for (const auto& violation : rep.violations) v.push_back(violation.detail);
  out["violations"] = v;
  std::cout << out.dump(2) << "\n";
  return rep.valid() ? 0 : 1;
}

int cmd_force(const std::string& path, const std::string& sigma, size_t depth,
              const std::string& out_path) {
  Json j = load_json_file(path);
  MartingaleTable table = adversary_from_json(j);
  ForcingResult r = greedy_force(limit(table), BinaryString::from_text(sigma), depth);
  Json out;
  out["path"] = r.path.text();
  Json trace = Json::array();
  for (const auto& v : r.capital_trace) trace.push_back(int_json(v));
  out["capital_trace"] = trace;
  out["strict_decreases"] = r.strict_decreases;
  std::cout << out.dump(2) << "\n";
  if (!out_path.empty()) {
    JsonlWriter w(out_path);
    w.header(out);
  }
  return 0;
}

int cmd_hat(const std::string& path, const std::string& sigma, Stage stages,
            const std::string& out_path) {
  Json j = load_json_file(path);
  MartingaleTable table = adversary_from_json(j);
  HatTrajectory t = hat_operator(table, BinaryString::from_text(sigma), stages);
  Json out;
  Json values = Json::array();
  for (const auto& v : t.values) values.push_back(v.text());
  out["values"] = values;
  out["change_count"] = t.change_count;
  std::cout << out.dump(2) << "\n";
  if (!out_path.empty()) {
    JsonlWriter w(out_path);
    w.header(out);
  }
  return 0;
}

int cmd_levels(const std::string& variant_name_in, const std::string& capitals_csv,
               size_t count) {
  auto variant = variant_from_name(variant_name_in);
  if (!variant) throw ConfigError("unknown variant: " + variant_name_in);
  LevelTable t = build_levels(*variant, parse_capitals(capitals_csv), count);
  Json out;
  out["variant"] = variant_name(t.variant);
  Json l = Json::array(), d = Json::array(), f = Json::array();
  for (const auto& x : t.l) l.push_back(int_json(x));
  for (const auto& x : t.d) d.push_back(int_json(x));
  for (size_t i = 1; i < t.f.size(); ++i) f.push_back(int_json(t.f[i]));
  Json grid = Json::array();
  for (const auto& row : t.intermediate) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(int_json(x));
    grid.push_back(r);
  }
  out["l"] = l;
  out["d"] = d;
  out["intermediate"] = grid;
  out["f"] = f;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_run(const std::string& engine, const std::string& roster_path, Stage stages,
            const std::string& out_path, const std::string& audit_mode) {
  Json roster = load_json_file(roster_path);
  AuditMode audit;
  if (audit_mode == "strict") {
    audit = AuditMode::Strict;
  } else if (audit_mode == "report") {
    audit = AuditMode::Report;
  } else {
    throw ConfigError("--audit must be strict or report");
  }
  auto sink = make_sink(out_path);
  bool audits_ok = false;
  Json report = run_engine_from_json(engine, roster, stages, audit, *sink, &audits_ok);
  sink->flush();
  std::cout << report.dump(2) << "\n";
  return audits_ok ? 0 : 1;
}

int cmd_replay(const std::string& trace_path) {
  ReplayResult r = replay_trace(trace_path);
  std::cout << r.message << "\n";
  return r.identical && r.audits_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integer-valued betting strategies and stage-by-stage constructions"};
  app.require_subcommand(1);

  std::string martingale_path, adversary_path, roster_path, trace_path, out_path;
  std::string sigma, variant = "plain", capitals = "1", audit = "strict";
  size_t depth = 8, count = 2;
  Stage stages = 1000;

  auto* validate_cmd = app.add_subcommand("validate", "check a martingale table");
  validate_cmd->add_option("--martingale", martingale_path, "martingale JSON file")->required();
  validate_cmd->add_option("--depth", depth, "check depth");

  auto* force_cmd = app.add_subcommand("force", "cone-force a bounded bettor");
  force_cmd->add_option("--adversary", adversary_path, "adversary JSON file")->required();
  force_cmd->add_option("--sigma", sigma, "start string (may be empty)");
  force_cmd->add_option("--depth", depth, "extension depth");
  force_cmd->add_option("--out", out_path, "write the result as JSONL");

  auto* hat_cmd = app.add_subcommand("hat", "staged least-decreasing-extension trajectory");
  hat_cmd->add_option("--adversary", adversary_path, "adversary JSON file")->required();
  hat_cmd->add_option("--sigma", sigma, "start string");
  hat_cmd->add_option("--stages", stages, "stage budget");
  hat_cmd->add_option("--out", out_path, "write the result as JSONL");

  auto* levels_cmd = app.add_subcommand("levels", "compute a level table");
  levels_cmd->add_option("--variant", variant, "plain|coding|pivr");
  levels_cmd->add_option("--capitals", capitals, "comma-separated adversary capitals");
  levels_cmd->add_option("--count", count, "levels to compute");

  auto* fi_cmd = app.add_subcommand("run-fi", "finite-injury construction");
  fi_cmd->add_option("--roster", roster_path, "roster JSON file")->required();
  fi_cmd->add_option("--stages", stages, "stage budget");
  fi_cmd->add_option("--out", out_path, "trace JSONL output");
  fi_cmd->add_option("--audit", audit, "strict|report");

  auto* lv_cmd = app.add_subcommand("run-lv", "level/forbidden-string construction");
  lv_cmd->add_option("--roster", roster_path, "roster JSON file")->required();
  lv_cmd->add_option("--stages", stages, "stage budget");
  lv_cmd->add_option("--out", out_path, "trace JSONL output");
  lv_cmd->add_option("--audit", audit, "strict|report");

  auto* anc_cmd = app.add_subcommand("run-anc", "very-strong-array construction");
  anc_cmd->add_option("--roster", roster_path, "roster JSON file")->required();
  anc_cmd->add_option("--stages", stages, "stage budget");
  anc_cmd->add_option("--out", out_path, "trace JSONL output");
  anc_cmd->add_option("--audit", audit, "strict|report");

  auto* replay_cmd = app.add_subcommand("replay", "re-run a trace and verify it");
  replay_cmd->add_option("--trace", trace_path, "trace JSONL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(martingale_path, depth);
    if (force_cmd->parsed()) return cmd_force(adversary_path, sigma, depth, out_path);
    if (hat_cmd->parsed()) return cmd_hat(adversary_path, sigma, stages, out_path);
    if (levels_cmd->parsed()) return cmd_levels(variant, capitals, count);
    if (fi_cmd->parsed()) return cmd_run("fi", roster_path, stages, out_path, audit);
    if (lv_cmd->parsed()) return cmd_run("lv", roster_path, stages, out_path, audit);
    if (anc_cmd->parsed()) return cmd_run("anc", roster_path, stages, out_path, audit);
    if (replay_cmd->parsed()) return cmd_replay(trace_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Json::parse_error& e) {
    std::cerr << "json error: " << e.what() << "\n";
    return 2;
  } catch (const ConstructionFault& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
