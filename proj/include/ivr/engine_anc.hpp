#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ivr/engine_common.hpp"
#include "ivr/martingale.hpp"
#include "ivr/trace.hpp"

namespace ivr {

// D_0 = {0}, D_1 = {1,2}, D_2 = {3,4,5}, ...; blocks partition N.
struct VeryStrongArray {
  static uint64_t block_min(uint64_t n) { return n * (n + 1) / 2; }
  static uint64_t block_size(uint64_t n) { return n + 1; }
  static uint64_t block_of(uint64_t x);
};

class FunctionalInconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GammaAxiom {
  uint64_t input = 0;
  BinaryString oracle_prefix;  // use = |oracle_prefix|
  int output = 0;
  Stage stage = 0;
};

struct DeltaAxiom {
  uint64_t input = 0;
  std::vector<uint64_t> oracle_set;  // sorted members below `use`
  uint64_t use = 0;
  int output = 0;
  Stage stage = 0;
};

// Gamma-style table: oracle is a binary string (A_e).
class StringFunctional {
 public:
  void add(GammaAxiom ax) { axioms_.push_back(std::move(ax)); }
  // output and use; nullopt on divergence. Throws on conflicting axioms.
  std::optional<std::pair<int, uint64_t>> eval(const BinaryString& oracle, uint64_t input,
                                               Stage stage) const;
  const std::vector<GammaAxiom>& axioms() const { return axioms_; }

 private:
  std::vector<GammaAxiom> axioms_;
};

// Delta-style table: oracle is the c.e. set B.
class SetFunctional {
 public:
  void add(DeltaAxiom ax);
  std::optional<std::pair<int, uint64_t>> eval(const std::set<uint64_t>& oracle, uint64_t input,
                                               Stage stage) const;
  const std::vector<DeltaAxiom>& axioms() const { return axioms_; }

 private:
  std::vector<DeltaAxiom> axioms_;
};

struct WStep {
  Stage stage = 0;
  std::vector<uint64_t> add;
};

struct AncEntry {
  std::vector<WStep> w_schedule;
  StringFunctional gamma;
  SetFunctional delta;
};

struct AncOptions {
  Stage budget = 1000;
  AuditMode audit = AuditMode::Strict;
  uint64_t max_k = 16;      // N_{e,k} considered for 2 <= k <= max_k
  size_t max_agreement = 4096;  // cap on length-of-agreement scans
};

struct AncReqReport {
  std::optional<uint64_t> follower;
  bool matched = false;
  uint64_t attentions_this_epoch = 0;
};

struct AncBetReport {
  uint64_t k = 0;
  std::string tau;
  Stage stage = 0;
};

struct AncReport {
  std::vector<AncReqReport> r_reqs;
  std::vector<std::vector<AncBetReport>> bets;  // per e
  std::vector<Int> m_value_at_d;                // m_e(A_e | d_e) at the end
  std::vector<std::string> failures;
  Stage stages_run = 0;
  bool audits_ok = true;
  Json to_json() const;
};

// The array-noncomputable-side engine: builds the c.e. set B with followers
// on the very strong array while the martingales m_e pressure the supplied
// (Gamma_e, Delta_e) table pairs.
class AncEngine {
 public:
  AncEngine(std::vector<AncEntry> roster, AncOptions opt, TraceSink& sink);

  void step();
  AncReport run();

  Stage stage() const { return stage_; }
  const std::set<uint64_t>& B() const { return B_; }
  std::optional<uint64_t> follower(uint64_t e) const { return followers_[e]; }
  const MartingaleTable& m(uint64_t e) const { return m_[e]; }
  size_t d(uint64_t e) const { return d_[e]; }

  std::set<uint64_t> w_at(uint64_t e, Stage s) const;
  BinaryString delta_prefix(uint64_t e) const;  // A_e[s]
  uint64_t length_of_agreement(uint64_t e) const;
  std::optional<uint64_t> gamma_use(uint64_t e, const BinaryString& a_e, uint64_t x) const;
  std::optional<uint64_t> delta_use(uint64_t e, uint64_t u) const;
  uint64_t restraint(uint64_t e, uint64_t k) const;  // r_{e,k,s}

  struct Attention {
    uint64_t position;
    bool is_r;
    uint64_t e;
    uint64_t k = 0;  // for N_{e,k}
  };
  std::optional<Attention> find_attention() const;
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  void act_r(uint64_t e);
  void act_n(uint64_t e, uint64_t k);
  void recovery_audit();
  void audit_diag(const std::string& msg);
  void audit_fail(const std::string& msg);
  void emit(std::string event, std::string req, Json payload);

  std::vector<AncEntry> roster_;
  AncOptions opt_;
  TraceSink& sink_;

  Stage stage_ = 0;
  std::set<uint64_t> B_;
  std::vector<std::optional<uint64_t>> followers_;
  std::vector<uint64_t> epoch_attentions_;
  std::vector<MartingaleTable> m_;
  std::vector<size_t> d_;
  uint64_t max_block_used_ = 0;
  bool any_follower_yet_ = false;

  struct Bet {
    BinaryString tau;
    uint64_t k;
    Stage stage;
  };
  std::vector<std::vector<Bet>> bets_;
  StringSet diagnosed_;  // bet strings already reported as adversarial
  std::vector<std::string> failures_;
};

// priority positions: R_0=0, N(unpair 0)=1, R_1=2, N(unpair 1)=3, ...
std::pair<uint64_t, uint64_t> cantor_unpair(uint64_t t);
uint64_t n_priority_position(uint64_t e, uint64_t k);

}  // namespace ivr
