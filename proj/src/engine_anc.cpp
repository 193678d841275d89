#include "ivr/engine_anc.hpp"

#include <algorithm>
#include <cassert>

namespace ivr {

uint64_t VeryStrongArray::block_of(uint64_t x) {
  uint64_t n = 0;
  while (block_min(n + 1) <= x) ++n;
  return n;
}

std::pair<uint64_t, uint64_t> cantor_unpair(uint64_t t) {
  uint64_t w = 0;
  while ((w + 1) * (w + 2) / 2 <= t) ++w;
  uint64_t r = t - w * (w + 1) / 2;
  return {r, w - r};
}

uint64_t n_priority_position(uint64_t e, uint64_t k) {
  uint64_t d = e + (k - 2);
  return 2 * (d * (d + 1) / 2 + e) + 1;
}

std::optional<std::pair<int, uint64_t>> StringFunctional::eval(const BinaryString& oracle,
                                                               uint64_t input,
                                                               Stage stage) const {
  std::optional<std::pair<int, uint64_t>> hit;
  for (const auto& ax : axioms_) {
    if (ax.input != input || ax.stage > stage) continue;
    if (!ax.oracle_prefix.is_prefix_of(oracle)) continue;
    if (hit && hit->first != ax.output) {
      throw FunctionalInconsistencyError(
          "functional inconsistency: input " + std::to_string(input) + " axioms with uses " +
          std::to_string(hit->second) + " and " + std::to_string(ax.oracle_prefix.size()) +
          " give different outputs");
    }
    if (!hit) hit = {ax.output, ax.oracle_prefix.size()};
  }
  return hit;
}

void SetFunctional::add(DeltaAxiom ax) {
  std::sort(ax.oracle_set.begin(), ax.oracle_set.end());
  axioms_.push_back(std::move(ax));
}

std::optional<std::pair<int, uint64_t>> SetFunctional::eval(const std::set<uint64_t>& oracle,
                                                            uint64_t input, Stage stage) const {
  std::optional<std::pair<int, uint64_t>> hit;
  for (const auto& ax : axioms_) {
    if (ax.input != input || ax.stage > stage) continue;
    bool match = true;
    // oracle restricted below use must equal the axiom's set
    size_t idx = 0;
    for (auto it = oracle.begin(); it != oracle.end() && *it < ax.use; ++it, ++idx) {
      if (idx >= ax.oracle_set.size() || ax.oracle_set[idx] != *it) {
        match = false;
        break;
      }
    }
    if (match && idx != ax.oracle_set.size()) match = false;
    if (!match) continue;
    if (hit && hit->first != ax.output) {
      throw FunctionalInconsistencyError(
          "functional inconsistency: input " + std::to_string(input) + " set-axioms with uses " +
          std::to_string(hit->second) + " and " + std::to_string(ax.use) +
          " give different outputs");
    }
    if (!hit) hit = {ax.output, ax.use};
  }
  return hit;
}

AncEngine::AncEngine(std::vector<AncEntry> roster, AncOptions opt, TraceSink& sink)
    : roster_(std::move(roster)), opt_(opt), sink_(sink) {
  followers_.resize(roster_.size());
  epoch_attentions_.resize(roster_.size(), 0);
  d_.resize(roster_.size(), 0);
  bets_.resize(roster_.size());
  for (size_t e = 0; e < roster_.size(); ++e) {
    m_.emplace_back(Int(1));  // m_e(lambda) = 1
  }
}

std::set<uint64_t> AncEngine::w_at(uint64_t e, Stage s) const {
  std::set<uint64_t> out;
  for (const auto& step : roster_[e].w_schedule) {
    if (step.stage <= s) out.insert(step.add.begin(), step.add.end());
  }
  return out;
}

BinaryString AncEngine::delta_prefix(uint64_t e) const {
  BinaryString out;
  for (uint64_t n = 0; n < opt_.max_agreement; ++n) {
    auto r = roster_[e].delta.eval(B_, n, stage_);
    if (!r) break;
    out.push_back(r->first);
  }
  return out;
}

uint64_t AncEngine::length_of_agreement(uint64_t e) const {
  BinaryString a_e = delta_prefix(e);
  uint64_t l = 0;
  while (l < opt_.max_agreement) {
    auto g = roster_[e].gamma.eval(a_e, l, stage_);
    if (!g) break;
    int b_l = B_.count(l) ? 1 : 0;
    if (g->first != b_l) break;
    ++l;
  }
  return l;
}

std::optional<uint64_t> AncEngine::gamma_use(uint64_t e, const BinaryString& a_e,
                                             uint64_t x) const {
  uint64_t use = 0;
  for (uint64_t y = 0; y < x; ++y) {
    auto g = roster_[e].gamma.eval(a_e, y, stage_);
    if (!g) return std::nullopt;
    use = std::max(use, g->second);
  }
  return use;
}

std::optional<uint64_t> AncEngine::delta_use(uint64_t e, uint64_t u) const {
  uint64_t use = 0;
  for (uint64_t n = 0; n < u; ++n) {
    auto r = roster_[e].delta.eval(B_, n, stage_);
    if (!r) return std::nullopt;
    use = std::max(use, r->second);
  }
  return use;
}

uint64_t AncEngine::restraint(uint64_t e, uint64_t k) const {
  // max D_i over followers of R-requirements of stronger priority than N_{e,k}
  uint64_t n_pos = n_priority_position(e, k);
  uint64_t r = 0;
  for (uint64_t j = 0; j < roster_.size(); ++j) {
    if (2 * j >= n_pos) continue;  // R_j weaker than N_{e,k}
    if (followers_[j]) {
      uint64_t i = *followers_[j];
      r = std::max(r, VeryStrongArray::block_min(i) + VeryStrongArray::block_size(i) - 1);
    }
  }
  return r;
}

std::optional<AncEngine::Attention> AncEngine::find_attention() const {
  std::optional<Attention> best;
  auto offer = [&](Attention a) {
    if (!best || a.position < best->position) best = a;
  };
  for (uint64_t e = 0; e < roster_.size(); ++e) {
    bool wants = false;
    if (!followers_[e]) {
      wants = true;
    } else {
      auto w = w_at(e, stage_);
      uint64_t i = *followers_[e];
      uint64_t lo = VeryStrongArray::block_min(i);
      uint64_t hi = lo + VeryStrongArray::block_size(i);
      for (uint64_t x = lo; x < hi && !wants; ++x) {
        wants = (w.count(x) != 0) != (B_.count(x) != 0);
      }
    }
    if (wants) offer({2 * e, true, e, 0});
  }
  for (uint64_t e = 0; e < roster_.size(); ++e) {
    BinaryString a_e = delta_prefix(e);
    uint64_t l = length_of_agreement(e);
    for (uint64_t k = 2; k <= opt_.max_k; ++k) {
      uint64_t pos = n_priority_position(e, k);
      if (best && pos >= best->position) break;  // positions grow with k
      // (1) m_e at the current Delta-prefix cut at d_e equals k-1
      if (a_e.size() < d_[e]) continue;
      auto val = MartingaleView(m_[e], stage_).value(a_e.prefix(d_[e]));
      if (!val || *val != Int(static_cast<unsigned long>(k - 1))) continue;
      uint64_t r = restraint(e, k);
      if (!(l > r)) continue;  // (2)
      auto gu = gamma_use(e, a_e, r);
      if (!gu) continue;
      auto du = delta_use(e, *gu);
      if (!du || !(l > *du)) continue;  // (3)
      auto gl = gamma_use(e, a_e, l);
      if (!gl || !(*gl > d_[e])) continue;  // (4)
      offer({pos, false, e, k});
      break;  // larger k are weaker for the same e
    }
  }
  return best;
}

void AncEngine::emit(std::string event, std::string req, Json payload) {
  sink_.emit(TraceEvent{stage_, std::move(event), std::move(req), std::move(payload)});
}

void AncEngine::act_r(uint64_t e) {
  if (!followers_[e]) {
    uint64_t i = any_follower_yet_ ? max_block_used_ + 1 : 0;
    // fresh large: least block index exceeding every block index ever used
    followers_[e] = i;
    max_block_used_ = std::max(max_block_used_, i);
    any_follower_yet_ = true;
    epoch_attentions_[e] = 0;
    emit("follower", "R_" + std::to_string(e), Json{{"block", i}});
    return;
  }
  uint64_t i = *followers_[e];
  epoch_attentions_[e] += 1;
  if (epoch_attentions_[e] > i + 1) {
    audit_fail("R_" + std::to_string(e) + " required attention more than i+1 = " +
               std::to_string(i + 1) + " times in one epoch");
  }
  auto w = w_at(e, stage_);
  uint64_t lo = VeryStrongArray::block_min(i);
  uint64_t hi = lo + VeryStrongArray::block_size(i);
  std::vector<uint64_t> added;
  for (uint64_t x = lo; x < hi; ++x) {
    if (w.count(x) && !B_.count(x)) {
      B_.insert(x);
      added.push_back(x);
    }
  }
  emit("enumerate", "R_" + std::to_string(e), Json{{"block", i}, {"elements", added}});
}

void AncEngine::act_n(uint64_t e, uint64_t k) {
  BinaryString a_e = delta_prefix(e);
  uint64_t l = length_of_agreement(e);
  auto gl = gamma_use(e, a_e, l);
  if (!gl || *gl > a_e.size()) {
    throw ConstructionFault("construction fault: oracle too short for N_" + std::to_string(e) +
                            "," + std::to_string(k));
  }
  BinaryString tau = a_e.prefix(*gl);
  // wager $1 on tau, neutral on all other strings with length in (d_e, |tau|]
  m_[e].declare(tau.prefix(tau.size() - 1), tau.bit(tau.size() - 1) == 1 ? Int(1) : Int(-1),
                stage_);
  m_[e].extend_neutral(tau.size(), stage_);
  d_[e] = tau.size();
  bets_[e].push_back({tau, k, stage_});
  emit("bet", "N_" + std::to_string(e) + "_" + std::to_string(k),
       Json{{"tau", tau.text()}, {"stake", 1}, {"d_e", d_[e]}});
  // remove followers of weaker R-requirements
  uint64_t pos = n_priority_position(e, k);
  std::vector<uint64_t> removed;
  for (uint64_t j = 0; j < roster_.size(); ++j) {
    if (2 * j > pos && followers_[j]) {
      removed.push_back(j);
      followers_[j] = std::nullopt;
      epoch_attentions_[j] = 0;
    }
  }
  if (!removed.empty()) {
    emit("injury", "N_" + std::to_string(e) + "_" + std::to_string(k),
         Json{{"followers_removed", removed}});
  }
}

void AncEngine::recovery_audit() {
  for (uint64_t e = 0; e < roster_.size(); ++e) {
    BinaryString a_e = delta_prefix(e);
    MartingaleView m(m_[e], stage_);
    for (const auto& bet : bets_[e]) {
      if (a_e.size() < bet.tau.size()) continue;
      BinaryString pi = a_e.prefix(bet.tau.size());
      if (pi == bet.tau) continue;
      // the recovered prefix must clear both the bet string and its sibling,
      // so the neutral padding keeps the prior winnings intact
      bool incomparable = !(pi == sibling(bet.tau));
      auto val = m.value(pi);
      bool value_ok = val && *val >= Int(static_cast<unsigned long>(bet.k - 1));
      if (!incomparable || !value_ok) {
        if (diagnosed_.insert(bet.tau).second) {
          audit_diag("adversarial functional: entry " + std::to_string(e) + " moved to " +
                     pi.text() + " against bet " + bet.tau.text() + " (k=" +
                     std::to_string(bet.k) + ")");
        }
      }
    }
  }
}

void AncEngine::audit_diag(const std::string& msg) { failures_.push_back(msg); }

void AncEngine::audit_fail(const std::string& msg) {
  failures_.push_back(msg);
  if (opt_.audit == AuditMode::Strict) throw ConstructionFault("audit failure: " + msg);
}

void AncEngine::step() {
  stage_ += 1;
  auto att = find_attention();
  if (att) {
    if (att->is_r) {
      act_r(att->e);
    } else {
      act_n(att->e, att->k);
    }
  }
  recovery_audit();
}

AncReport AncEngine::run() {
  for (Stage s = 0; s < opt_.budget; ++s) step();
  AncReport rep;
  rep.stages_run = stage_;
  rep.audits_ok = failures_.empty();
  rep.failures = failures_;
  for (uint64_t e = 0; e < roster_.size(); ++e) {
    AncReqReport rr;
    rr.follower = followers_[e];
    rr.attentions_this_epoch = epoch_attentions_[e];
    if (followers_[e]) {
      auto w = w_at(e, stage_);
      uint64_t i = *followers_[e];
      uint64_t lo = VeryStrongArray::block_min(i);
      uint64_t hi = lo + VeryStrongArray::block_size(i);
      rr.matched = true;
      for (uint64_t x = lo; x < hi && rr.matched; ++x) {
        rr.matched = (w.count(x) != 0) == (B_.count(x) != 0);
      }
    }
    rep.r_reqs.push_back(rr);
    std::vector<AncBetReport> bets;
    for (const auto& b : bets_[e]) bets.push_back({b.k, b.tau.text(), b.stage});
    rep.bets.push_back(std::move(bets));
    BinaryString a_e = delta_prefix(e);
    Int v = 0;
    if (a_e.size() >= d_[e]) {
      auto val = MartingaleView(m_[e], stage_).value(a_e.prefix(d_[e]));
      if (val) v = *val;
    }
    rep.m_value_at_d.push_back(v);
  }
  return rep;
}

Json AncReport::to_json() const {
  Json j;
  j["stages_run"] = stages_run;
  Json rs = Json::array();
  for (size_t e = 0; e < r_reqs.size(); ++e) {
    Json r;
    r["req"] = "R_" + std::to_string(e);
    if (r_reqs[e].follower) {
      r["follower"] = *r_reqs[e].follower;
      r["matched"] = r_reqs[e].matched;
    } else {
      r["follower"] = nullptr;
    }
    r["attentions_this_epoch"] = r_reqs[e].attentions_this_epoch;
    rs.push_back(r);
  }
  j["R"] = rs;
  Json ns = Json::array();
  for (size_t e = 0; e < bets.size(); ++e) {
    Json b = Json::array();
    for (const auto& bet : bets[e]) {
      b.push_back(Json{{"k", bet.k}, {"tau", bet.tau}, {"stage", bet.stage}});
    }
    ns.push_back(Json{{"e", e}, {"bets", b}, {"m_value_at_d", int_json(m_value_at_d[e])}});
  }
  j["N"] = ns;
  j["audit"] = Json{{"failures", failures}, {"ok", audits_ok}};
  return j;
}

}  // namespace ivr
