#include "ivr/roster_io.hpp"

#include <fstream>
#include <memory>

namespace ivr {

namespace {

Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<int64_t>()));
  if (j.is_string()) return Int(j.get<std::string>());
  throw ConfigError("expected integer (number or decimal string)");
}

MartingaleTable builtin_from_json(const Json& j) {
  const Json& b = j.at("builtin");
  std::string name = b.at("name").get<std::string>();
  Json params = b.value("params", Json::object());
  Int capital = int_from_json(j.at("initial_capital"));
  Stage from = params.value("available_from_stage", Stage(0));
  if (name == "doubling") {
    return make_doubling(params.value("bit", 1), capital, from);
  }
  if (name == "constant_bet") {
    return make_constant_bet(params.value("bit", 1), int_from_json(params.at("stake")), capital,
                             from);
  }
  if (name == "bet_on_bit") {
    return make_bet_on_bit(params.value("bit", 1), int_from_json(params.at("stake")), capital,
                           from);
  }
  if (name == "copycat") {
    auto inner = std::make_shared<MartingaleTable>(adversary_from_json(params.at("other")));
    return make_copycat(inner, params.value("delay", Stage(0)));
  }
  throw ConfigError("unknown builtin strategy: " + name);
}

}  // namespace

MartingaleTable adversary_from_json(const Json& j) {
  std::string kind = j.value("kind", "table");
  if (kind == "builtin") return builtin_from_json(j);
  if (kind != "table") throw ConfigError("unknown adversary kind: " + kind);
  MartingaleTable t(int_from_json(j.at("initial_capital")));
  for (const Json& w : j.value("wagers", Json::array())) {
    BinaryString node = BinaryString::from_text(w.at("node").get<std::string>());
    int side = w.at("side").get<int>();
    if (side != 0 && side != 1) throw ConfigError("wager side must be 0 or 1");
    Int stake = int_from_json(w.at("stake"));
    if (stake < 0) throw ConfigError("wager stake must be >= 0");
    t.declare(node, side == 1 ? stake : Int(-stake), w.value("defined_at_stage", Stage(0)));
  }
  return t;
}

ValueConstraint constraint_from_json(const Json& j) {
  std::string kind = j.value("kind", "integer");
  if (kind == "integer") return ValueConstraint::integer();
  if (kind == "F") {
    std::vector<Int> f;
    for (const Json& x : j.at("F")) f.push_back(int_from_json(x));
    return ValueConstraint::f_valued(std::move(f));
  }
  if (kind == "single") return ValueConstraint::single(int_from_json(j.at("a")));
  throw ConfigError("unknown constraint kind: " + kind);
}

FiRosterSpec load_fi_roster(const Json& j) {
  FiRosterSpec spec;
  spec.raw = j;
  for (const Json& a : j.at("adversaries")) {
    spec.adversaries.push_back(adversary_from_json(a));
  }
  return spec;
}

LvRosterSpec load_lv_roster(const Json& j) {
  LvRosterSpec spec;
  spec.raw = j;
  for (const Json& a : j.at("adversaries")) {
    spec.adversaries.push_back(adversary_from_json(a));
  }
  for (const Json& c : j.at("declared_capitals")) {
    spec.declared_capitals.push_back(int_from_json(c));
  }
  for (const Json& b : j.value("restraint_script", Json::array())) {
    spec.script.push_back(
        {b.at("stage").get<Stage>(), b.at("e").get<uint64_t>(), b.at("r").get<uint64_t>()});
  }
  spec.level_count = j.value("level_count", size_t(3));
  return spec;
}

AncRosterSpec load_anc_roster(const Json& j) {
  AncRosterSpec spec;
  spec.raw = j;
  for (const Json& ej : j.at("entries")) {
    AncEntry entry;
    for (const Json& w : ej.value("W", Json::array())) {
      WStep step;
      step.stage = w.at("stage").get<Stage>();
      for (const Json& x : w.at("add")) step.add.push_back(x.get<uint64_t>());
      entry.w_schedule.push_back(std::move(step));
    }
    for (const Json& g : ej.value("Gamma", Json::array())) {
      GammaAxiom ax;
      ax.input = g.at("input").get<uint64_t>();
      ax.oracle_prefix = BinaryString::from_text(g.at("oracle_prefix").get<std::string>());
      ax.output = g.at("output").get<int>();
      ax.stage = g.value("stage", Stage(0));
      entry.gamma.add(std::move(ax));
    }
    for (const Json& d : ej.value("Delta", Json::array())) {
      DeltaAxiom ax;
      ax.input = d.at("input").get<uint64_t>();
      for (const Json& x : d.at("oracle_set")) ax.oracle_set.push_back(x.get<uint64_t>());
      ax.use = d.at("use").get<uint64_t>();
      ax.output = d.at("output").get<int>();
      ax.stage = d.value("stage", Stage(0));
      entry.delta.add(std::move(ax));
    }
    spec.entries.push_back(std::move(entry));
  }
  return spec;
}

Json run_header(const std::string& engine, Stage budget, AuditMode audit, const Json& roster) {
  Json h;
  h["schema_version"] = kTraceSchemaVersion;
  h["engine"] = engine;
  h["budget"] = budget;
  h["audit"] = audit == AuditMode::Strict ? "strict" : "report";
  h["roster"] = roster;
  return h;
}

Json run_engine_from_json(const std::string& engine, const Json& roster, Stage budget,
                          AuditMode audit, TraceSink& sink, bool* audits_ok) {
  sink.header(run_header(engine, budget, audit, roster));
  if (engine == "fi") {
    FiRosterSpec spec = load_fi_roster(roster);
    FiOptions opt;
    opt.budget = budget;
    opt.audit = audit;
    FiEngine eng(std::move(spec.adversaries), opt, sink);
    FiReport rep = eng.run();
    if (audits_ok) *audits_ok = rep.audit.ok();
    return rep.to_json();
  }
  if (engine == "lv") {
    LvRosterSpec spec = load_lv_roster(roster);
    LvOptions opt;
    opt.budget = budget;
    opt.audit = audit;
    opt.level_count = spec.level_count;
    LevelTable table =
        build_levels(LevelVariant::Plain, spec.declared_capitals, spec.level_count);
    LvEngine eng(std::move(spec.adversaries), std::move(table), spec.script, opt, sink);
    LvReport rep = eng.run();
    if (audits_ok) *audits_ok = rep.audits_ok;
    return rep.to_json();
  }
  if (engine == "anc") {
    AncRosterSpec spec = load_anc_roster(roster);
    AncOptions opt;
    opt.budget = budget;
    opt.audit = audit;
    AncEngine eng(std::move(spec.entries), opt, sink);
    AncReport rep = eng.run();
    if (audits_ok) *audits_ok = rep.audits_ok;
    return rep.to_json();
  }
  throw ConfigError("unknown engine: " + engine);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path);
  return Json::parse(in);  // parse errors carry byte positions
}

ReplayResult replay_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.empty()) throw ConfigError("empty trace: " + path);
  Json header = Json::parse(lines[0]);
  if (header.value("schema_version", -1) != kTraceSchemaVersion) {
    throw ConfigError("trace schema version mismatch");
  }
  std::string engine = header.at("engine").get<std::string>();
  Stage budget = header.at("budget").get<Stage>();
  AuditMode audit =
      header.value("audit", "strict") == std::string("strict") ? AuditMode::Strict
                                                               : AuditMode::Report;
  VectorSink sink;
  bool audits_ok = false;
  run_engine_from_json(engine, header.at("roster"), budget, audit, sink, &audits_ok);
  ReplayResult out;
  out.audits_ok = audits_ok;
  size_t n = std::min(lines.size(), sink.lines().size());
  for (size_t i = 0; i < n; ++i) {
    if (lines[i] != sink.lines()[i]) {
      out.divergence_line = i + 1;
      out.message = "divergence at line " + std::to_string(i + 1) + ": trace has " + lines[i] +
                    " replay has " + sink.lines()[i];
      return out;
    }
  }
  if (lines.size() != sink.lines().size()) {
    out.divergence_line = n + 1;
    out.message = "trace and replay have different lengths (" + std::to_string(lines.size()) +
                  " vs " + std::to_string(sink.lines().size()) + ")";
    return out;
  }
  out.identical = true;
  out.message = audits_ok ? "identical, audits pass" : "identical, audits FAILED";
  return out;
}

}  // namespace ivr
