#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ivr/engine_common.hpp"
#include "ivr/martingale.hpp"
#include "ivr/trace.hpp"

namespace ivr {

// The global partial martingale m under construction: explicit $1 cone
// wagers plus "$1 along this tail path from this node length" rules, so
// "wager $1 on every initial segment of A_{s+1}" is represented exactly.
// Where several sources cover a node, the earliest-declared one stands.
class GlobalMartingale {
 public:
  explicit GlobalMartingale(Int capital) : capital_(std::move(capital)) {}

  const Int& capital() const { return capital_; }

  void add_tail_rule(TailSequence path, size_t from_node_len);
  // Explicit $1 wager toward `bit`; the node must be fresh (construction fault
  // otherwise: the correctness argument depends on never redefining m).
  void declare_cone(const BinaryString& node, int bit);

  std::optional<int> wager(const BinaryString& node) const;
  bool defined(const BinaryString& s) const;
  std::optional<Int> value(const BinaryString& s) const;

  // Values along prefixes of X, indices 0..len (undefined entries stop the walk).
  std::vector<Int> values_along(const TailSequence& x, size_t len) const;

  // (length,lex)-least defined string extending base with value == target and
  // length <= max_len, walking only the defined region.
  std::optional<BinaryString> least_defined_with_value(const BinaryString& base,
                                                       const Int& target, size_t max_len) const;

  size_t rule_count() const { return rules_.size(); }
  size_t cone_count() const { return cone_.size(); }
  // beyond this node length, values along any stem+1^w path change by the
  // tail-rule stakes only
  size_t max_cone_len() const { return cone_.empty() ? 0 : cone_.rbegin()->first.size() + 1; }

 private:
  struct TailRule {
    TailSequence path;
    size_t from;
  };
  Int capital_;
  std::map<BinaryString, int, LenLexLess> cone_;
  std::vector<TailRule> rules_;
};

struct FiOptions {
  Stage budget = 1000;
  AuditMode audit = AuditMode::Strict;
  // attention-length window beyond the current stem for rule-total
  // adversaries (explicit tables are scanned to their convergence depth)
  size_t scan_window = 64;
  uint64_t report_q_max = 32;
};

enum class FiReqStatus { NeverTriggered, Waiting, Attacked, Quiescent };

struct FiReqReport {
  FiReqStatus status = FiReqStatus::NeverTriggered;
  uint64_t waiting_length = 0;
  uint64_t attacks = 0;
  bool case2_done = false;
  Int case2_bound;  // n_e(tau) at Case-2 time
};

struct FiAudit {
  uint64_t eq2_points_checked = 0;
  Int eq2_min_value;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

struct FiReport {
  std::vector<FiReqReport> r_reqs;
  std::map<uint64_t, std::pair<bool, uint64_t>> q_reqs;  // e -> (satisfied, witness len)
  FiAudit audit;
  Stage stages_run = 0;
  Json to_json() const;
};

// The finite-injury engine: builds A_s and the global m against a finite
// roster of staged adversaries, requirements ordered R_0, R_1, R_2, Q_2,
// R_3, Q_3, ...
class FiEngine {
 public:
  FiEngine(std::vector<MartingaleTable> roster, FiOptions opt, TraceSink& sink);

  void step();  // one stage: execute the strongest attention case, audit
  FiReport run();

  // state access (tests, audits)
  Stage stage() const { return stage_; }
  const TailSequence& A() const { return A_; }
  const GlobalMartingale& m() const { return m_; }
  uint64_t restraint(uint64_t e) const;
  std::optional<uint64_t> waiting_length(uint64_t e) const;

  struct Attention {
    uint64_t position;  // priority position, lower acts first
    enum class Kind { RCaseI, RCaseII, Q } kind;
    uint64_t e;
    size_t l = 0;  // witnessing length for R case (i)
  };
  std::optional<Attention> find_attention();

  const FiAudit& audit() const { return audit_; }

 private:
  friend struct FiEngineTestAccess;
  struct ReqState {
    bool waiting = false;
    uint64_t waiting_len = 0;
    bool acted_since_injury = false;
    bool ever_attention = false;
    bool case2_done = false;
    Int case2_bound;
    BinaryString case2_tau;
    uint64_t attacks_since_case2 = 0;
  };

  uint64_t read_restraint(uint64_t e) const;
  void materialize_restraints(uint64_t upto);
  void injure_above(uint64_t p, const std::string& by);
  void note_used(uint64_t n) { max_used_ = std::max(max_used_, n); }

  MartingaleView adversary(uint64_t e) const { return MartingaleView(roster_[e], stage_); }
  size_t scan_limit(uint64_t e) const;
  std::optional<size_t> least_attention_length(uint64_t e);
  std::optional<uint64_t> least_q_attention();

  void act_case1a(uint64_t e);
  void act_case1b(uint64_t e, size_t l);
  void act_case2(uint64_t e);
  void act_case3(uint64_t e);

  void move_A(TailSequence next, size_t rule_from, const char* cause);
  void run_eq2_audit();
  void audit_fail(const std::string& msg);
  void emit(std::string event, std::string req, Json payload);

  // A-move-invalidated value caches; values along A are stage-stable once
  // defined, so each cache carries the first stage every point is available.
  const std::vector<Int>& m_values(size_t len);
  struct AdvCache {
    std::vector<Int> values;       // values[n] = n_e(A|n), as far as limit-defined
    std::vector<Stage> needed_at;  // first stage at which values[n] is available
  };
  const AdvCache& adv_values(uint64_t e, size_t len);
  size_t affine_floor() const;  // length past which m grows +1 per bit along A

  std::vector<MartingaleTable> roster_;
  FiOptions opt_;
  TraceSink& sink_;

  Stage stage_ = 0;
  TailSequence A_;
  GlobalMartingale m_;
  std::vector<uint64_t> restraint_head_;
  uint64_t restraint_tail_start_ = 0;  // r_e = tail_start + (e - head.size()) beyond the head
  uint64_t max_used_ = 0;
  std::map<uint64_t, ReqState> reqs_;
  FiAudit audit_;

  std::vector<Int> m_cache_;
  std::vector<AdvCache> adv_cache_;
  bool caches_dirty_ = true;
};

}  // namespace ivr
