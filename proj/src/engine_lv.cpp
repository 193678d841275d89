#include "ivr/engine_lv.hpp"

#include <algorithm>
#include <cassert>

namespace ivr {

LvEngine::LvEngine(std::vector<MartingaleTable> roster, LevelTable levels,
                   std::vector<RestraintBump> restraint_script, LvOptions opt, TraceSink& sink)
    : roster_(std::move(roster)),
      levels_(std::move(levels)),
      script_(std::move(restraint_script)),
      opt_(opt),
      sink_(sink),
      registry_(&levels_) {
  if (levels_.count() < 2) throw std::invalid_argument("lv engine needs at least 2 levels");
  opt_.level_count = std::min(opt_.level_count, levels_.count());
  if (roster_.size() > opt_.level_count) {
    throw std::invalid_argument("roster larger than the level budget");
  }
  for (size_t e = 0; e < roster_.size(); ++e) {
    if (e < levels_.capitals.size() && roster_[e].initial_capital() != levels_.capitals[e]) {
      throw std::invalid_argument("declared capital mismatch for adversary " +
                                  std::to_string(e));
    }
  }
  script_fired_.resize(script_.size(), false);
  A_ = TailSequence{BinaryString(), 1};
  restraints_.resize(roster_.size());
  for (size_t e = 0; e < roster_.size(); ++e) restraints_[e] = levels_.level_len(e);
  block_used_.resize(opt_.level_count, 0);
  attacks_at_level_.resize(opt_.level_count + 1, 0);
  record_A("init");
}

Int LvEngine::adversary_value(uint64_t e, size_t len) const {
  auto v = MartingaleView(roster_[e], stage_).value(A_.prefix(len));
  assert(v);
  return *v;
}

std::optional<std::pair<size_t, size_t>> LvEngine::requires_attention(uint64_t e) const {
  // levels l_{i+1} need l_{i+2} in the table for the recording move
  for (size_t level = 1; level + 1 <= opt_.level_count; ++level) {
    size_t i = level - 1;
    if (e > i) continue;  // only R_0..R_i act at level l_{i+1}
    size_t l_hi = levels_.level_len(level);
    size_t l_lo = levels_.level_len(i);
    if (!(l_hi >= restraints_[e])) continue;
    // defined on all strings of length <= l_{i+1}: wagers at every node below
    if (!roster_[e].total_to_length(l_hi, stage_)) continue;
    Int at_lo = adversary_value(e, l_lo);
    if (!(adversary_value(e, l_hi) > at_lo)) continue;
    for (size_t l = l_lo + 1; l <= l_hi; ++l) {
      if (adversary_value(e, l) > at_lo) return std::make_pair(level, l);
    }
  }
  return std::nullopt;
}

void LvEngine::emit(std::string event, std::string req, Json payload) {
  sink_.emit(TraceEvent{stage_, std::move(event), std::move(req), std::move(payload)});
}

void LvEngine::audit_fail(const std::string& msg) {
  failures_.push_back(msg);
  if (opt_.audit == AuditMode::Strict) throw ConstructionFault("audit failure: " + msg);
}

void LvEngine::audit_diag(const std::string& msg) { failures_.push_back(msg); }

void LvEngine::record_A(const char* cause) {
  VisitRecord rec;
  rec.b.assign(B_.begin(), B_.end());
  for (size_t j = 0; j <= opt_.level_count; ++j) {
    BinaryString stem = A_.prefix(levels_.level_len(j));
    rec.stems.push_back(stem);
    if (j >= 1) {
      visited_[j].insert(stem);
      // Delta axiom: reading A|l_j answers B below d_{j-1}
      uint64_t d_lo = static_cast<uint64_t>(levels_.d[j - 1].get_ui());
      std::vector<uint64_t> snapshot;
      for (uint64_t x : B_) {
        if (x < d_lo) snapshot.push_back(x);
      }
      auto [it, added] = delta_axioms_[j].try_emplace(stem, snapshot);
      if (!added && it->second != snapshot) {
        forbidden_avoidance_ok_ = false;
        audit_fail(std::string("A extends a string with a stale Delta axiom after ") + cause);
      }
    }
  }
  records_.push_back(std::move(rec));
  // forbidden avoidance: no prefix of A at any level length is registered
  for (size_t j = 1; j <= opt_.level_count; ++j) {
    BinaryString stem = A_.prefix(levels_.level_len(j));
    if (registry_.at_level(j).count(stem)) {
      forbidden_avoidance_ok_ = false;
      audit_fail(std::string("A extends forbidden string at level ") + std::to_string(j) +
                 " after " + cause);
    }
  }
}

void LvEngine::sweep_forbidden(uint64_t new_element) {
  // eager marking: every recorded Delta reading that now disagrees with B
  for (auto& [j, axioms] : delta_axioms_) {
    uint64_t d_lo = static_cast<uint64_t>(levels_.d[j - 1].get_ui());
    if (new_element >= d_lo) continue;
    for (const auto& [stem, snapshot] : axioms) {
      std::vector<uint64_t> now;
      for (uint64_t x : B_) {
        if (x < d_lo) now.push_back(x);
      }
      if (now != snapshot) {
        if (registry_.insert(j, stem, stage_, "stale Delta reading")) {
          emit("forbid", "", Json{{"level", j}, {"string", stem.text()}});
        }
      }
    }
  }
}

void LvEngine::act_attack(uint64_t e, size_t level, size_t l) {
  size_t i = level - 1;
  size_t l_hi = levels_.level_len(level);
  size_t l_next = levels_.level_len(level + 1);
  size_t l_lo = levels_.level_len(i);

  // tau of length l_{i+1} extending the sibling of A|l (flip index l-1),
  // maximin-far from the forbidden strings of that length above A|l_i
  BinaryString cone = A_.prefix(l);
  cone.flip_last();
  BinaryString a_lo = A_.prefix(l_lo);
  StringSet no_visited;
  BinaryString tau = maximin_select(registry_, cone, l_hi, no_visited, false, &a_lo,
                                    opt_.enumeration_cap);

  // enumerate the least unused element of [d_i, d_{i+1}) into B
  uint64_t blk_lo = static_cast<uint64_t>(levels_.d[i].get_ui());
  uint64_t blk_hi = static_cast<uint64_t>(levels_.d[level].get_ui());
  std::optional<uint64_t> element;
  for (uint64_t x = blk_lo; x < blk_hi; ++x) {
    if (!B_.count(x)) {
      element = x;
      break;
    }
  }
  if (!element) {
    throw ConstructionFault("construction fault: block exhausted at level " +
                            std::to_string(level));
  }
  B_.insert(*element);
  block_used_[i] += 1;
  emit("B_enum", "R_" + std::to_string(e), Json{{"element", *element}, {"block", i}});
  sweep_forbidden(*element);

  // record the B-change: unvisited rho of length l_{i+2} extending tau,
  // maximin-far from the forbidden strings above tau
  BinaryString rho =
      maximin_select(registry_, tau, l_next, visited_[level + 1], true, &tau,
                     opt_.enumeration_cap);

  Int old_hi = adversary_value(e, l_hi);
  emit("attack", "R_" + std::to_string(e),
       Json{{"level", level}, {"l", l}, {"tau", tau.text()}, {"rho", rho.text()}});
  A_ = TailSequence{rho, 1};
  record_A("attack");

  // audits: the attack forces the adversary's capital down across the level
  Int new_hi = adversary_value(e, l_hi);
  Int new_lo = adversary_value(e, l_lo);
  if (!(new_hi < new_lo)) {
    audit_diag("attack did not force a decrease: R_" + std::to_string(e) + " level " +
               std::to_string(level) + " m_e(A'|l_hi)=" + new_hi.get_str() + " m_e(A'|l_lo)=" +
               new_lo.get_str());
  }
  if (!(new_hi < old_hi)) {
    audit_diag("attack did not reduce the level value: R_" + std::to_string(e) + " level " +
               std::to_string(level));
  }
  // move-distance audit against the grid position
  uint64_t k = attacks_at_level_[level];
  const auto& grid = levels_.intermediate[level];
  size_t gi = std::min<size_t>(k + 1, grid.size() - 1);
  auto forb = registry_.of_length(l_hi, &a_lo);
  if (!forb.empty()) {
    size_t mind = SIZE_MAX;
    for (const auto& mu : forb) mind = std::min(mind, distance(tau, mu));
    size_t budget_line = l_hi - static_cast<size_t>(grid[gi].get_ui());
    if (!(mind >= budget_line)) {
      audit_diag("move-distance audit: tau distance " + std::to_string(mind) +
                 " under grid line " + std::to_string(budget_line) + " at level " +
                 std::to_string(level) + " attack " + std::to_string(k));
    }
  }

  attacks_at_level_[level] += 1;
  for (size_t lv = level + 1; lv < attacks_at_level_.size(); ++lv) attacks_at_level_[lv] = 0;
  attack_totals_["e=" + std::to_string(e) + ",level=" + std::to_string(level)] += 1;

  // lift restraints: for all e' >= e with r_{e'} <= l_{i+1}
  for (uint64_t ep = e; ep < restraints_.size(); ++ep) {
    if (restraints_[ep] <= l_hi) restraints_[ep] = l_hi;
  }
}

void LvEngine::act_restraint_bump(size_t idx) {
  script_fired_[idx] = true;
  const auto& bump = script_[idx];
  emit("restraint", "N_" + std::to_string(bump.e), Json{{"e", bump.e}, {"r", bump.r}});
  for (uint64_t ep = bump.e + 1; ep < restraints_.size(); ++ep) {
    if (restraints_[ep] <= bump.r) restraints_[ep] = bump.r;
  }
}

void LvEngine::step() {
  stage_ += 1;
  // priority order R_0 > N_0 > R_1 > N_1 > ...
  uint64_t max_e = roster_.size();
  for (const auto& b : script_) max_e = std::max(max_e, b.e + 1);
  std::optional<std::pair<uint64_t, std::pair<size_t, size_t>>> attack;  // e, (level, l)
  std::optional<size_t> bump_idx;
  for (uint64_t e = 0; e < max_e && !attack && !bump_idx; ++e) {
    if (e < roster_.size()) {
      if (auto att = requires_attention(e)) {
        attack = {e, *att};
        break;
      }
    }
    // pending scripted N_e bump at this or an earlier stage
    for (size_t s = 0; s < script_.size(); ++s) {
      if (!script_fired_[s] && script_[s].e == e && script_[s].stage <= stage_) {
        bump_idx = s;
        break;
      }
    }
  }
  if (attack) {
    act_attack(attack->first, attack->second.first, attack->second.second);
  } else if (bump_idx) {
    act_restraint_bump(*bump_idx);
  }
}

void LvEngine::round_trip_audit() {
  // Gamma direction: the same B reading must always accompany the same stem,
  // and vice versa, level by level; replaying the records reconstructs every
  // visited stem from B alone.
  for (size_t j = 0; j <= opt_.level_count && round_trip_ok_; ++j) {
    uint64_t d_lo = j == 0 ? 0 : static_cast<uint64_t>(levels_.d[j].get_ui());
    std::map<std::vector<uint64_t>, BinaryString> fwd;
    std::map<std::string, std::vector<uint64_t>> bwd;
    for (const auto& rec : records_) {
      std::vector<uint64_t> b_read;
      for (uint64_t x : rec.b) {
        if (x < d_lo) b_read.push_back(x);
      }
      const BinaryString& stem = rec.stems[j];
      auto [it, added] = fwd.try_emplace(b_read, stem);
      if (!added && !(it->second == stem)) {
        round_trip_ok_ = false;
        audit_diag("round-trip: B reading maps to two stems at level " + std::to_string(j));
        break;
      }
      auto [it2, added2] = bwd.try_emplace(stem.text(), b_read);
      if (!added2 && it2->second != b_read) {
        round_trip_ok_ = false;
        audit_diag("round-trip: stem maps to two B readings at level " + std::to_string(j));
        break;
      }
    }
  }
}

LvReport LvEngine::run() {
  for (Stage s = 0; s < opt_.budget; ++s) step();
  round_trip_audit();
  LvReport rep;
  rep.stages_run = stage_;
  rep.attacks = attack_totals_;
  for (size_t i = 0; i + 1 <= opt_.level_count; ++i) {
    rep.block_used.push_back(block_used_[i]);
    rep.block_capacity.push_back(static_cast<uint64_t>(Int(levels_.d[i + 1] - levels_.d[i]).get_ui()));
    if (block_used_[i] > rep.block_capacity.back()) {
      audit_diag("block over-use at index " + std::to_string(i));
    }
  }
  rep.forbidden_count = registry_.size();
  rep.bound_violations = registry_.bound_violations().size();
  rep.round_trip_ok = round_trip_ok_;
  rep.forbidden_avoidance_ok = forbidden_avoidance_ok_;
  rep.failures = failures_;
  rep.audits_ok = failures_.empty() && round_trip_ok_ && forbidden_avoidance_ok_;
  return rep;
}

Json LvReport::to_json() const {
  Json j;
  j["stages_run"] = stages_run;
  Json at = Json::object();
  for (const auto& [k, v] : attacks) at[k] = v;
  j["attacks"] = at;
  j["block_used"] = block_used;
  j["block_capacity"] = block_capacity;
  j["forbidden_count"] = forbidden_count;
  j["bound_violations"] = bound_violations;
  j["round_trip_ok"] = round_trip_ok;
  j["forbidden_avoidance_ok"] = forbidden_avoidance_ok;
  j["audit"] = Json{{"failures", failures}, {"ok", audits_ok}};
  return j;
}

}  // namespace ivr
