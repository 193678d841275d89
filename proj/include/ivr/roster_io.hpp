#pragma once

#include <string>
#include <vector>

#include "ivr/engine_anc.hpp"
#include "ivr/engine_fi.hpp"
#include "ivr/engine_lv.hpp"
#include "ivr/trace.hpp"

namespace ivr {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adversary file:
// {"id": str, "kind": "table"|"builtin", "initial_capital": int,
//  "wagers": [{"node": "0101", "side": 0|1, "stake": int, "defined_at_stage": int}],
//  "builtin": {"name": str, "params": {...}},
//  "constraint": {"kind": "integer"|"F"|"single", "F": [ints], "a": int}}
MartingaleTable adversary_from_json(const Json& j);
ValueConstraint constraint_from_json(const Json& j);

struct FiRosterSpec {
  std::vector<MartingaleTable> adversaries;
  Json raw;
};
FiRosterSpec load_fi_roster(const Json& j);

struct LvRosterSpec {
  std::vector<MartingaleTable> adversaries;
  std::vector<Int> declared_capitals;
  std::vector<RestraintBump> script;
  size_t level_count = 3;
  Json raw;
};
LvRosterSpec load_lv_roster(const Json& j);

struct AncRosterSpec {
  std::vector<AncEntry> entries;
  Json raw;
};
AncRosterSpec load_anc_roster(const Json& j);

Json run_header(const std::string& engine, Stage budget, AuditMode audit, const Json& roster);

// Runs the named engine from a roster json, emitting the header and the
// trace into `sink`; returns the final report as json.
Json run_engine_from_json(const std::string& engine, const Json& roster, Stage budget,
                          AuditMode audit, TraceSink& sink, bool* audits_ok);

struct ReplayResult {
  bool identical = false;
  bool audits_ok = false;
  size_t divergence_line = 0;  // 1-based; 0 when identical
  std::string message;
};

// Re-executes the engine from the trace's embedded config and verifies
// event-by-event equality plus the engine audits.
ReplayResult replay_trace(const std::string& path);

Json load_json_file(const std::string& path);

}  // namespace ivr
