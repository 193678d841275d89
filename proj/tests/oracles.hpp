#pragma once

// Test-side oracles, independent of the library implementations they check:
// a deterministic rng, a brute-force replayer for the builtin schedules,
// exhaustive cone scans, and the literal mu-searches. Expected values frozen
// in the tests were produced by these.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ivr/bits.hpp"
#include "ivr/martingale.hpp"

namespace oracle {

// splitmix64: identical on every platform, unlike <random> distributions
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  uint64_t below(uint64_t n) { return next() % n; }
  int64_t in_range(int64_t lo, int64_t hi) {  // inclusive
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }
};

// Straight-line replay of a builtin schedule along a bit string; returns the
// capital sequence (length |bits|+1).
inline std::vector<long long> replay_builtin(const std::string& name, int bit, long long stake,
                                             long long capital, const std::string& bits) {
  std::vector<long long> out{capital};
  long long cap = capital;
  long long sched = 1;
  for (char c : bits) {
    int b = c - '0';
    long long st = 0;
    if (name == "doubling") {
      st = std::min(sched, cap);
      if (st > 0) {
        if (b == bit) {
          cap += st;
          sched = 1;
        } else {
          cap -= st;
          sched *= 2;
        }
      }
    } else if (name == "constant_bet") {
      st = cap >= stake ? stake : 0;
      if (st > 0) cap += b == bit ? st : -st;
    } else if (name == "bet_on_bit") {
      st = std::min(stake, cap);
      if (st > 0) cap += b == bit ? st : -st;
    }
    out.push_back(cap);
  }
  return out;
}

// Random total valid table: wagers bounded by the running value.
inline ivr::MartingaleTable random_valid_table(Rng& rng, size_t depth, long long max_capital,
                                               long long max_stake) {
  long long cap = rng.in_range(0, max_capital);
  ivr::MartingaleTable t(ivr::Int(static_cast<long>(cap)));
  struct Item {
    ivr::BinaryString node;
    long long value;
  };
  std::vector<Item> stack{{ivr::BinaryString(), cap}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.node.size() >= depth) continue;
    long long lim = std::min(max_stake, it.value);
    long long w = rng.in_range(-lim, lim);
    t.declare(it.node, ivr::Int(static_cast<long>(w)), 0);
    stack.push_back({it.node.child(0), it.value - w});
    stack.push_back({it.node.child(1), it.value + w});
  }
  return t;
}

// Random staged partial table: stages are monotone along paths, subtrees are
// pruned at random (partiality), wagers stay valid.
inline ivr::MartingaleTable random_staged_table(Rng& rng, size_t depth, long long max_capital,
                                                ivr::Stage max_stage, int prune_percent) {
  long long cap = rng.in_range(0, max_capital);
  ivr::MartingaleTable t(ivr::Int(static_cast<long>(cap)));
  struct Item {
    ivr::BinaryString node;
    long long value;
    ivr::Stage stage;
  };
  std::vector<Item> stack{{ivr::BinaryString(), cap, 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.node.size() >= depth) continue;
    if (rng.below(100) < static_cast<uint64_t>(prune_percent)) continue;
    long long lim = std::min<long long>(3, it.value);
    long long w = rng.in_range(-lim, lim);
    ivr::Stage st = std::max(it.stage, static_cast<ivr::Stage>(rng.below(max_stage + 1)));
    t.declare(it.node, ivr::Int(static_cast<long>(w)), st);
    stack.push_back({it.node.child(0), it.value - w, st});
    stack.push_back({it.node.child(1), it.value + w, st});
  }
  return t;
}

inline std::vector<ivr::BinaryString> all_strings(const ivr::BinaryString& base, size_t len) {
  std::vector<ivr::BinaryString> out;
  size_t gap = len - base.size();
  for (uint64_t x = 0; x < (uint64_t(1) << gap); ++x) {
    ivr::BinaryString s = base;
    for (size_t i = 0; i < gap; ++i) s.push_back(static_cast<int>((x >> (gap - 1 - i)) & 1));
    out.push_back(s);
  }
  return out;
}

// lex-least tau >= sigma of length h with value(tau) <= value(sigma), by
// whole-cone enumeration
inline std::optional<ivr::BinaryString> brute_least_decreasing(const ivr::MartingaleView& m,
                                                               const ivr::BinaryString& sigma,
                                                               size_t h) {
  auto bound = m.value(sigma);
  if (!bound) return std::nullopt;
  for (const auto& tau : all_strings(sigma, h)) {
    auto v = m.value(tau);
    if (v && *v <= *bound) return tau;
  }
  return std::nullopt;
}

// argmax over candidates of (min distance to forbidden), lex tie-break
inline std::optional<std::pair<ivr::BinaryString, size_t>> brute_maximin(
    const std::vector<ivr::BinaryString>& forbidden, const ivr::BinaryString& base, size_t len,
    const ivr::StringSet& visited, bool exclude) {
  std::optional<std::pair<ivr::BinaryString, size_t>> best;
  for (const auto& cand : all_strings(base, len)) {
    if (exclude && visited.count(cand)) continue;
    size_t dist = SIZE_MAX;
    for (const auto& mu : forbidden) dist = std::min(dist, ivr::distance(cand, mu));
    if (!best || dist > best->second) best = {cand, dist};
  }
  return best;
}

// literal mu-search: n(k) = (mu n)(k - 1 - 2 - ... - 2^(n-1) < k/2), n(0)=0
inline uint32_t brute_move_bound(uint64_t k) {
  if (k == 0) return 0;
  for (uint32_t n = 0;; ++n) {
    __int128 sum = (static_cast<__int128>(1) << n) - 1;
    // k - sum < k/2 exactly: 2(k - sum) < k
    if (2 * (static_cast<__int128>(k) - sum) < static_cast<__int128>(k)) return n;
  }
}

// literal hat recursion with a full (length,lex) scan over all strings
struct BruteHat {
  std::vector<ivr::BinaryString> values;
  uint64_t changes = 0;
};

inline BruteHat brute_hat(const ivr::MartingaleTable& adv, const ivr::BinaryString& sigma,
                          ivr::Stage budget) {
  BruteHat out;
  out.values.push_back(sigma);
  ivr::BinaryString cur = sigma;
  for (ivr::Stage s = 1; s <= budget; ++s) {
    ivr::MartingaleView m(adv, s);
    auto vcur = m.value(cur);
    if (vcur) {
      bool moved = false;
      for (size_t len = cur.size(); len <= s && !moved; ++len) {
        for (const auto& tau : all_strings(cur, len)) {
          auto v = m.value(tau);
          if (v && *v < *vcur) {
            cur = tau;
            out.changes += 1;
            moved = true;
            break;
          }
        }
      }
    }
    out.values.push_back(cur);
  }
  return out;
}

}  // namespace oracle
