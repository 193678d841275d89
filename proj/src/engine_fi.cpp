#include "ivr/engine_fi.hpp"

#include <algorithm>
#include <cassert>

#include "ivr/forcing.hpp"

namespace ivr {

void GlobalMartingale::add_tail_rule(TailSequence path, size_t from_node_len) {
  rules_.push_back({std::move(path), from_node_len});
}

void GlobalMartingale::declare_cone(const BinaryString& node, int bit) {
  if (wager(node).has_value()) {
    throw ConstructionFault("construction fault: m already defined at " + node.text());
  }
  cone_.emplace(node, bit == 1 ? 1 : -1);
}

std::optional<int> GlobalMartingale::wager(const BinaryString& node) const {
  auto it = cone_.find(node);
  if (it != cone_.end()) return it->second;
  for (const auto& rule : rules_) {
    if (node.size() < rule.from) continue;
    bool on_path = true;
    for (size_t i = 0; i < node.size() && on_path; ++i) {
      on_path = node.bit(i) == rule.path.bit(i);
    }
    if (on_path) return rule.path.bit(node.size()) == 1 ? 1 : -1;
  }
  return std::nullopt;
}

bool GlobalMartingale::defined(const BinaryString& s) const {
  BinaryString node;
  for (size_t n = 0; n < s.size(); ++n) {
    if (!wager(node).has_value()) return false;
    node.push_back(s.bit(n));
  }
  return true;
}

std::optional<Int> GlobalMartingale::value(const BinaryString& s) const {
  Int v = capital_;
  BinaryString node;
  for (size_t n = 0; n < s.size(); ++n) {
    auto w = wager(node);
    if (!w) return std::nullopt;
    if (s.bit(n) == 1) v += *w; else v -= *w;
    node.push_back(s.bit(n));
  }
  return v;
}

std::vector<Int> GlobalMartingale::values_along(const TailSequence& x, size_t len) const {
  // incremental rule matching: a rule stays live while x agrees with its path
  std::vector<char> live(rules_.size(), 1);
  std::vector<Int> out;
  out.reserve(len + 1);
  Int v = capital_;
  out.push_back(v);
  BinaryString node;
  for (size_t n = 0; n < len; ++n) {
    std::optional<int> w;
    auto it = cone_.find(node);
    if (it != cone_.end()) w = it->second;
    for (size_t r = 0; !w && r < rules_.size(); ++r) {
      if (live[r] && n >= rules_[r].from) {
        w = rules_[r].path.bit(n) == 1 ? 1 : -1;
      }
    }
    if (!w) break;
    int bit = x.bit(n);
    if (bit == 1) v += *w; else v -= *w;
    out.push_back(v);
    for (size_t r = 0; r < rules_.size(); ++r) {
      if (live[r] && rules_[r].path.bit(n) != bit) live[r] = 0;
    }
    node.push_back(bit);
  }
  return out;
}

std::optional<BinaryString> GlobalMartingale::least_defined_with_value(const BinaryString& base,
                                                                       const Int& target,
                                                                       size_t max_len) const {
  auto v0 = value(base);
  if (!v0) return std::nullopt;
  struct Frame {
    BinaryString node;
    Int value;
  };
  std::vector<Frame> frontier{{base, *v0}};
  for (size_t len = base.size(); len <= max_len; ++len) {
    for (const auto& f : frontier) {
      if (f.value == target) return f.node;
    }
    if (len == max_len) break;
    std::vector<Frame> next;
    for (const auto& f : frontier) {
      if (auto w = wager(f.node)) {
        next.push_back({f.node.child(0), f.value - *w});
        next.push_back({f.node.child(1), f.value + *w});
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

FiEngine::FiEngine(std::vector<MartingaleTable> roster, FiOptions opt, TraceSink& sink)
    : roster_(std::move(roster)), opt_(opt), sink_(sink), m_(Int(2)) {
  // Stage 0: A = 1^w, m(empty) = 2 staking $1 on every initial segment of A,
  // restraints r_e = e, nothing waiting.
  A_ = TailSequence{BinaryString(), 1};
  m_.add_tail_rule(A_, 0);
  restraint_tail_start_ = 0;
  adv_cache_.resize(roster_.size());
  run_eq2_audit();
}

uint64_t FiEngine::read_restraint(uint64_t e) const {
  if (e < restraint_head_.size()) return restraint_head_[e];
  return restraint_tail_start_ + (e - restraint_head_.size());
}

uint64_t FiEngine::restraint(uint64_t e) const { return read_restraint(e); }

std::optional<uint64_t> FiEngine::waiting_length(uint64_t e) const {
  auto it = reqs_.find(e);
  if (it != reqs_.end() && it->second.waiting) return it->second.waiting_len;
  return std::nullopt;
}

void FiEngine::materialize_restraints(uint64_t upto) {
  if (restraint_head_.size() > upto) return;
  uint64_t base = restraint_tail_start_;
  uint64_t from = restraint_head_.size();
  while (restraint_head_.size() <= upto) {
    uint64_t r = base + (restraint_head_.size() - from);
    restraint_head_.push_back(r);
    note_used(r);
  }
  restraint_tail_start_ = restraint_head_.back() + 1;
}

void FiEngine::injure_above(uint64_t p, const std::string& by) {
  materialize_restraints(p);
  uint64_t fresh = max_used_ + 1;
  restraint_head_.resize(p + 1);
  restraint_tail_start_ = fresh;
  for (auto it = reqs_.upper_bound(p); it != reqs_.end(); ++it) {
    it->second = ReqState{};
  }
  emit("injury", "", Json{{"by", by}, {"first_injured", p + 1}, {"fresh_base", fresh}});
}

size_t FiEngine::affine_floor() const {
  return std::max(A_.stem.size(), m_.max_cone_len());
}

const std::vector<Int>& FiEngine::m_values(size_t len) {
  if (caches_dirty_ || m_cache_.size() < len + 1) {
    size_t want = std::max(len, affine_floor() + opt_.scan_window) + 2;
    m_cache_ = m_.values_along(A_, want);
    for (auto& c : adv_cache_) {
      c.values.clear();
      c.needed_at.clear();
    }
    caches_dirty_ = false;
  }
  return m_cache_;
}

const FiEngine::AdvCache& FiEngine::adv_values(uint64_t e, size_t len) {
  m_values(0);  // clears adversary caches together with the m cache when dirty
  AdvCache& c = adv_cache_[e];
  if (c.values.size() < len + 1) {
    const MartingaleTable& t = roster_[e];
    c.values.clear();
    c.needed_at.clear();
    Int v = t.initial_capital();
    Stage need = 0;
    c.values.push_back(v);
    c.needed_at.push_back(need);
    BinaryString node;
    for (size_t n = 0; n < len; ++n) {
      auto avail = t.available_from(node);
      if (!avail) break;  // limit-undefined along A from here on
      auto w = t.wager_at(node, kLimitStage);
      assert(w);
      need = std::max(need, *avail);
      if (A_.bit(n) == 1) v += *w; else v -= *w;
      c.values.push_back(v);
      c.needed_at.push_back(need);
      node.push_back(A_.bit(n));
    }
  }
  return c;
}

size_t FiEngine::scan_limit(uint64_t e) const {
  size_t base = std::max<size_t>(A_.stem.size(), read_restraint(e));
  if (!roster_[e].rule_backed()) {
    return std::min(base + opt_.scan_window, roster_[e].max_entry_length() + 1);
  }
  return base + opt_.scan_window;
}

std::optional<size_t> FiEngine::least_attention_length(uint64_t e) {
  size_t lmax = scan_limit(e);
  uint64_t r = read_restraint(e);
  if (r + 1 > lmax) return std::nullopt;
  const AdvCache& c = adv_values(e, lmax);
  const MartingaleTable& t = roster_[e];
  for (size_t l = r + 1; l <= lmax; ++l) {
    if (l >= c.values.size() || c.needed_at[l] > stage_) return std::nullopt;
    if (!t.total_to_length(l, stage_)) return std::nullopt;  // totality is monotone in l
    if (c.values[l] > c.values[l - 1]) return l;
  }
  return std::nullopt;
}

std::optional<uint64_t> FiEngine::least_q_attention() {
  // Q_e requires attention iff m(A | r_e) < e, e >= 2. Explicit indices are
  // checked directly; past the affine floor the values along A grow exactly
  // +1 per bit, so the tail check is a single margin comparison.
  uint64_t head = restraint_head_.size();
  uint64_t tail_first = std::max<uint64_t>(head, 2);
  size_t L0 = affine_floor();
  size_t probe = std::max<size_t>(L0, read_restraint(tail_first)) + 2;
  for (uint64_t e = 2; e < head; ++e) probe = std::max<size_t>(probe, read_restraint(e) + 1);
  const std::vector<Int>& mv = m_values(probe);
  for (uint64_t e = 2; e < head; ++e) {
    uint64_t r = read_restraint(e);
    assert(r < mv.size());
    if (mv[r] < e) return e;
  }
  uint64_t r_first = read_restraint(tail_first);
  assert(r_first < mv.size());
  if (r_first >= L0) {
    // value(A|r_e) - e is constant across the whole tail
    Int margin = mv[r_first] - Int(static_cast<unsigned long>(tail_first));
    if (margin < 0) return tail_first;
    return std::nullopt;
  }
  // tail starts inside the stem region; walk the finitely many in-stem indices
  for (uint64_t e = tail_first;; ++e) {
    uint64_t r = read_restraint(e);
    assert(r < mv.size());
    if (mv[r] < e) return e;
    if (r >= L0) {
      Int margin = mv[r] - Int(static_cast<unsigned long>(e));
      return margin < 0 ? std::optional<uint64_t>(e) : std::nullopt;
    }
  }
}

std::optional<FiEngine::Attention> FiEngine::find_attention() {
  // positions: R_0=0, R_1=1, R_2=2, Q_2=3, R_3=4, Q_3=5, ...
  auto r_pos = [](uint64_t e) { return e <= 2 ? e : 2 * e - 2; };
  auto q_pos = [](uint64_t e) { return 2 * e - 1; };
  std::optional<Attention> best;
  auto offer = [&](Attention a) {
    if (!best || a.position < best->position) best = a;
  };
  for (uint64_t e = 0; e < roster_.size(); ++e) {
    const ReqState* st = nullptr;
    auto it = reqs_.find(e);
    if (it != reqs_.end()) st = &it->second;
    if (st && st->waiting) {
      if (adversary(e).total_to_length(st->waiting_len)) {
        offer({r_pos(e), Attention::Kind::RCaseII, e, st->waiting_len});
      }
    } else {
      if (auto l = least_attention_length(e)) {
        offer({r_pos(e), Attention::Kind::RCaseI, e, *l});
      }
    }
  }
  if (auto qe = least_q_attention()) {
    offer({q_pos(*qe), Attention::Kind::Q, *qe, 0});
  }
  return best;
}

void FiEngine::emit(std::string event, std::string req, Json payload) {
  sink_.emit(TraceEvent{stage_, std::move(event), std::move(req), std::move(payload)});
}

void FiEngine::move_A(TailSequence next, size_t rule_from, const char* cause) {
  note_used(next.stem.size());
  m_.add_tail_rule(next, rule_from);
  A_ = std::move(next);
  caches_dirty_ = true;
  if (!m_.defined(A_.prefix(A_.stem.size() + 1))) {
    throw ConstructionFault("construction fault: m undefined along new A after " +
                            std::string(cause));
  }
  emit("A_move", "", Json{{"stem", A_.stem.text()}, {"tail", A_.tail_bit}});
}

void FiEngine::act_case1a(uint64_t e) {
  uint64_t r = read_restraint(e);
  BinaryString cone_root = A_.prefix(r).child(0);
  auto nv = adversary(e).value(cone_root);
  if (!nv) throw ConstructionFault("construction fault: adversary undefined at cone root");
  if (*nv < 0) {
    audit_fail("adversary " + std::to_string(e) + " negative at cone root (invalid martingale)");
  }
  Int h_int = *nv + 1 + Int(static_cast<unsigned long>(r + 1));
  uint64_t h = h_int.fits_ulong_p() ? h_int.get_ui() : 0;
  if (h <= r + 1) throw ConstructionFault("construction fault: waiting length not past cone");
  auto& st = reqs_[e];
  st.waiting = true;
  st.waiting_len = h;
  st.acted_since_injury = true;
  st.ever_attention = true;
  note_used(h);
  emit("case1a", "R_" + std::to_string(e), Json{{"r", r}, {"waiting_length", h}});
}

void FiEngine::act_case1b(uint64_t e, size_t l) {
  // flip A at index l-1 (move to the sibling of A|l), keep everything below
  BinaryString stem = A_.prefix(l);
  stem.flip_last();
  auto& st = reqs_[e];
  st.acted_since_injury = true;
  st.ever_attention = true;
  if (st.case2_done) {
    st.attacks_since_case2 += 1;
    if (Int(static_cast<unsigned long>(st.attacks_since_case2)) > st.case2_bound) {
      audit_fail("R_" + std::to_string(e) + " attacked more than n_e(tau) = " +
                 st.case2_bound.get_str() + " times");
    }
  }
  emit("case1b", "R_" + std::to_string(e), Json{{"l", l}, {"flip_index", l - 1}});
  emit("wager", "R_" + std::to_string(e),
       Json{{"kind", "tail"}, {"stem", stem.text()}, {"from_node_len", l}});
  move_A(TailSequence{stem, 1}, l, "case1b");
  injure_above(e, "R_" + std::to_string(e));
}

void FiEngine::act_case2(uint64_t e) {
  auto& st = reqs_[e];
  uint64_t r = read_restraint(e);
  uint64_t h = st.waiting_len;
  if (A_.bit(r) != 1) {
    throw ConstructionFault("construction fault: A(r) != 1 at Case 2 for R_" +
                            std::to_string(e));
  }
  BinaryString cone_root = A_.prefix(r).child(0);
  MartingaleView n_e = adversary(e);
  BinaryString tau = least_decreasing_extension(n_e, cone_root, h);
  Int m_tau = *m_.value(cone_root) + Int(static_cast<unsigned long>(tau.size() - (r + 1)));
  Int n_tau = *n_e.value(tau);
  emit("case2", "R_" + std::to_string(e),
       Json{{"h", h},
            {"cone_root", cone_root.text()},
            {"tau", tau.text()},
            {"m_tau", int_json(m_tau)},
            {"n_tau", int_json(n_tau)}});
  // m stakes $1 along every initial segment of tau with length in (r+1, |tau|]
  for (size_t n = r + 1; n < tau.size(); ++n) {
    m_.declare_cone(tau.prefix(n), tau.bit(n));
  }
  emit("wager", "R_" + std::to_string(e),
       Json{{"kind", "cone"}, {"tau", tau.text()}, {"from_node_len", r + 1}});
  note_used(tau.size());
  move_A(TailSequence{tau, 1}, tau.size(), "case2");

  if (m_tau != *m_.value(tau)) {
    throw ConstructionFault("construction fault: cone arithmetic drifted at Case 2");
  }
  if (!(m_tau > n_tau)) {
    audit_fail("Case 2 dominance failed for R_" + std::to_string(e) + ": m(tau)=" +
               m_tau.get_str() + " n_e(tau)=" + n_tau.get_str());
  }
  st.case2_done = true;
  st.case2_bound = n_tau;
  st.case2_tau = tau;
  st.attacks_since_case2 = 0;
  st.acted_since_injury = true;
  st.ever_attention = true;

  // restraints fresh for e' > e; waiting cleared for e'' >= e (literal asymmetry)
  st.waiting = false;
  injure_above(e, "R_" + std::to_string(e));
}

void FiEngine::act_case3(uint64_t e) {
  materialize_restraints(e);
  uint64_t r = read_restraint(e);
  size_t L0 = std::max(affine_floor(), static_cast<size_t>(r));
  const std::vector<Int>& mv = m_values(L0 + 1);
  assert(r < mv.size());
  if (!(mv[r] < e)) throw ConstructionFault("construction fault: Q attention vanished");
  Int target(static_cast<unsigned long>(e));
  // bound the search: along A the value grows +1 per bit past L0
  Int need = target - mv[L0];
  size_t max_len = L0 + (need > 0 && need.fits_ulong_p() ? need.get_ui() : 0) + 1;
  auto tau = m_.least_defined_with_value(A_.prefix(r), target, max_len);
  if (!tau) throw ConstructionFault("construction fault: no tau with m(tau)=e for Q");
  emit("case3", "Q_" + std::to_string(e),
       Json{{"r", r}, {"tau", tau->text()}, {"m_at_r", int_json(mv[r])}});
  emit("wager", "Q_" + std::to_string(e),
       Json{{"kind", "tail"}, {"stem", tau->text()}, {"from_node_len", tau->size()}});
  note_used(tau->size());
  move_A(TailSequence{*tau, 1}, tau->size(), "case3");
  injure_above(e, "Q_" + std::to_string(e));
  // Q_e is now satisfied: tau < A with m(tau) = e
}

void FiEngine::run_eq2_audit() {
  // past the affine floor the values only grow, so the floor bounds every dip
  size_t len = affine_floor() + 2;
  const std::vector<Int>& mv = m_values(len);
  if (mv.size() < len + 1) {
    audit_fail("m undefined along A at length " + std::to_string(mv.size()));
    return;
  }
  for (size_t n = 0; n <= len; ++n) {
    audit_.eq2_points_checked += 1;
    if (audit_.eq2_points_checked == 1 || mv[n] < audit_.eq2_min_value) {
      audit_.eq2_min_value = mv[n];
    }
    if (mv[n] < 1) {
      audit_fail("eq2 violated: m(A|" + std::to_string(n) + ") = " + mv[n].get_str() +
                 " at stage " + std::to_string(stage_));
      return;
    }
  }
}

void FiEngine::audit_fail(const std::string& msg) {
  audit_.failures.push_back(msg);
  if (opt_.audit == AuditMode::Strict) throw ConstructionFault("audit failure: " + msg);
}

void FiEngine::step() {
  stage_ += 1;
  auto att = find_attention();
  if (att) {
    switch (att->kind) {
      case Attention::Kind::RCaseI: {
        auto it = reqs_.find(att->e);
        bool acted = it != reqs_.end() && it->second.acted_since_injury;
        if (acted) {
          act_case1b(att->e, att->l);
        } else {
          act_case1a(att->e);
        }
        break;
      }
      case Attention::Kind::RCaseII:
        act_case2(att->e);
        break;
      case Attention::Kind::Q:
        act_case3(att->e);
        break;
    }
  }
  run_eq2_audit();
}

FiReport FiEngine::run() {
  for (Stage s = 0; s < opt_.budget; ++s) step();
  FiReport rep;
  rep.stages_run = stage_;
  for (uint64_t e = 0; e < roster_.size(); ++e) {
    FiReqReport rr;
    auto it = reqs_.find(e);
    if (it == reqs_.end() || !it->second.ever_attention) {
      rr.status = FiReqStatus::NeverTriggered;
    } else if (it->second.attacks_since_case2 > 0) {
      rr.status = FiReqStatus::Attacked;
      rr.attacks = it->second.attacks_since_case2;
    } else if (it->second.waiting) {
      rr.status = FiReqStatus::Waiting;
      rr.waiting_length = it->second.waiting_len;
    } else {
      rr.status = FiReqStatus::Quiescent;
    }
    if (it != reqs_.end()) {
      rr.case2_done = it->second.case2_done;
      rr.case2_bound = it->second.case2_bound;
    }
    rep.r_reqs.push_back(rr);
  }
  // Q_e is satisfied when m reaches $e along A within the audited horizon
  size_t horizon = A_.stem.size() + opt_.scan_window;
  const std::vector<Int>& mv = m_values(horizon);
  for (uint64_t e = 2; e <= opt_.report_q_max; ++e) {
    bool sat = false;
    uint64_t witness = 0;
    for (size_t n = 0; n < mv.size(); ++n) {
      if (mv[n] >= Int(static_cast<unsigned long>(e))) {
        sat = true;
        witness = n;
        break;
      }
    }
    rep.q_reqs[e] = {sat, witness};
  }
  rep.audit = audit_;
  return rep;
}

Json FiReport::to_json() const {
  Json j;
  j["stages_run"] = stages_run;
  Json rs = Json::array();
  for (size_t e = 0; e < r_reqs.size(); ++e) {
    const auto& r = r_reqs[e];
    Json e_j;
    e_j["req"] = "R_" + std::to_string(e);
    switch (r.status) {
      case FiReqStatus::NeverTriggered:
        e_j["status"] = "never-triggered";
        break;
      case FiReqStatus::Waiting:
        e_j["status"] = "waiting";
        e_j["waiting_length"] = r.waiting_length;
        break;
      case FiReqStatus::Attacked:
        e_j["status"] = "attacked";
        e_j["attacks"] = r.attacks;
        break;
      case FiReqStatus::Quiescent:
        e_j["status"] = "quiescent";
        break;
    }
    if (r.case2_done) e_j["case2_bound"] = int_json(r.case2_bound);
    rs.push_back(e_j);
  }
  j["R"] = rs;
  Json qs = Json::array();
  for (const auto& [e, sw] : q_reqs) {
    qs.push_back(Json{{"req", "Q_" + std::to_string(e)},
                      {"status", sw.first ? "satisfied" : "pending"},
                      {"witness_len", sw.second}});
  }
  j["Q"] = qs;
  j["audit"] = Json{{"eq2_points_checked", audit.eq2_points_checked},
                    {"eq2_min_value", int_json(audit.eq2_min_value)},
                    {"failures", audit.failures},
                    {"ok", audit.ok()}};
  return j;
}

}  // namespace ivr
