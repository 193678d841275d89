#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ivr/engine_common.hpp"
#include "ivr/levels.hpp"
#include "ivr/martingale.hpp"
#include "ivr/trace.hpp"

namespace ivr {

struct RestraintBump {
  Stage stage = 0;
  uint64_t e = 0;
  uint64_t r = 0;
};

struct LvOptions {
  Stage budget = 1000;
  AuditMode audit = AuditMode::Strict;
  size_t level_count = 3;       // attacks happen at levels l_1..l_{count-1}
  size_t enumeration_cap = 20;  // maximin dispatch threshold
};

struct LvReport {
  std::map<std::string, uint64_t> attacks;  // "e=0,level=1" -> count
  std::vector<uint64_t> block_used;         // enumerations per block [d_i, d_{i+1})
  std::vector<uint64_t> block_capacity;
  uint64_t forbidden_count = 0;
  uint64_t bound_violations = 0;
  bool round_trip_ok = true;
  bool forbidden_avoidance_ok = true;
  std::vector<std::string> failures;
  Stage stages_run = 0;
  bool audits_ok = true;
  Json to_json() const;
};

// The level/forbidden-string engine: builds A and B with the plain-variant
// level scheme, maintaining the Gamma/Delta bookkeeping (A|l_i <-> B|d_i) at
// every stage. N_e lowness requirements are scriptable restraint bumps.
class LvEngine {
 public:
  LvEngine(std::vector<MartingaleTable> roster, LevelTable levels,
           std::vector<RestraintBump> restraint_script, LvOptions opt, TraceSink& sink);

  void step();
  LvReport run();

  Stage stage() const { return stage_; }
  const TailSequence& A() const { return A_; }
  const std::set<uint64_t>& B() const { return B_; }
  uint64_t restraint(uint64_t e) const { return restraints_[e]; }
  const ForbiddenRegistry& registry() const { return registry_; }
  const LevelTable& levels() const { return levels_; }

  // least level index i+1 at which R_e requires attention, with the least
  // witnessing length l, or nullopt
  std::optional<std::pair<size_t, size_t>> requires_attention(uint64_t e) const;

 private:
  void act_attack(uint64_t e, size_t level, size_t l);
  void act_restraint_bump(size_t script_idx);
  void sweep_forbidden(uint64_t new_element);
  void record_A(const char* cause);
  void round_trip_audit();
  void audit_fail(const std::string& msg);
  void audit_diag(const std::string& msg);
  void emit(std::string event, std::string req, Json payload);
  Int adversary_value(uint64_t e, size_t len) const;

  std::vector<MartingaleTable> roster_;
  LevelTable levels_;
  std::vector<RestraintBump> script_;
  std::vector<bool> script_fired_;
  LvOptions opt_;
  TraceSink& sink_;

  Stage stage_ = 0;
  TailSequence A_;
  std::set<uint64_t> B_;
  ForbiddenRegistry registry_;
  std::vector<uint64_t> restraints_;
  std::vector<uint64_t> block_used_;
  std::map<size_t, StringSet> visited_;  // level index -> A|l_level ever visited
  // Delta bookkeeping: A|l_j -> B restricted below d_{j-1}, recorded per visit
  std::map<size_t, std::map<BinaryString, std::vector<uint64_t>, LenLexLess>> delta_axioms_;
  // Gamma bookkeeping for the round-trip audit: per stem-visit, B and stems
  struct VisitRecord {
    std::vector<uint64_t> b;
    std::vector<BinaryString> stems;  // A|l_j for (levels within count) j
  };
  std::vector<VisitRecord> records_;
  std::vector<uint64_t> attacks_at_level_;  // since the last action at a lower level
  std::map<std::string, uint64_t> attack_totals_;
  std::vector<std::string> failures_;
  bool round_trip_ok_ = true;
  bool forbidden_avoidance_ok_ = true;
};

}  // namespace ivr
