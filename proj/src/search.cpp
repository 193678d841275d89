#include "ivr/search.hpp"

#include <atomic>
#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ivr::search {

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

constexpr size_t kSplitBits = 10;     // 1024 blocks per parallel scan
constexpr size_t kParallelGap = 16;   // below this the serial kernel wins

BinaryString with_suffix_bits(const BinaryString& base, uint64_t value, size_t nbits) {
  BinaryString out = base;
  for (size_t i = 0; i < nbits; ++i) {
    out.push_back(static_cast<int>((value >> (nbits - 1 - i)) & 1));
  }
  return out;
}

// Lex-ordered DFS; returns the first full-length extension with value <= bound.
bool dfs_least(const MartingaleView& m, BinaryString& node, const Int& value, size_t len,
               const Int& bound, BinaryString& out) {
  if (node.size() == len) {
    if (value <= bound) {
      out = node;
      return true;
    }
    return false;
  }
  auto w = m.wager(node);
  if (!w) return false;  // undefined below: whole subtree is out of the domain
  for (int b = 0; b <= 1; ++b) {
    node.push_back(b);
    Int child = b == 1 ? Int(value + *w) : Int(value - *w);
    if (dfs_least(m, node, child, len, bound, out)) {
      node.pop_back();
      return true;
    }
    node.pop_back();
  }
  return false;
}

}  // namespace

std::optional<BinaryString> least_value_extension_serial(const MartingaleView& m,
                                                         const BinaryString& base, size_t len,
                                                         const Int& bound) {
  assert(len >= base.size());
  auto v0 = m.value(base);
  if (!v0) return std::nullopt;
  BinaryString node = base;
  BinaryString out;
  if (dfs_least(m, node, *v0, len, bound, out)) return out;
  return std::nullopt;
}

std::optional<BinaryString> least_value_extension_parallel(const MartingaleView& m,
                                                           const BinaryString& base, size_t len,
                                                           const Int& bound) {
#ifndef _OPENMP
  return least_value_extension_serial(m, base, len, bound);
#else
  size_t gap = len - base.size();
  if (gap < kParallelGap) return least_value_extension_serial(m, base, len, bound);
  size_t split = kSplitBits;
  uint64_t nblocks = uint64_t(1) << split;
  std::vector<std::optional<BinaryString>> hit(nblocks);
  std::atomic<uint64_t> first_hit{nblocks};
  auto v0 = m.value(base);
  if (!v0) return std::nullopt;
#pragma omp parallel for schedule(dynamic, 1)
  for (uint64_t blk = 0; blk < nblocks; ++blk) {
    if (blk >= first_hit.load(std::memory_order_relaxed)) continue;
    BinaryString node = with_suffix_bits(base, blk, split);
    // walk the block prefix
    Int value = *v0;
    bool dead = false;
    for (size_t i = base.size(); i < node.size(); ++i) {
      auto w = m.wager(node.prefix(i));
      if (!w) {
        dead = true;
        break;
      }
      if (node.bit(i) == 1) value += *w; else value -= *w;
    }
    if (dead) continue;
    BinaryString out;
    if (dfs_least(m, node, value, len, bound, out)) {
      hit[blk] = out;
      uint64_t cur = first_hit.load(std::memory_order_relaxed);
      while (blk < cur && !first_hit.compare_exchange_weak(cur, blk)) {
      }
    }
  }
  uint64_t best = first_hit.load();
  if (best < nblocks) return hit[best];
  return std::nullopt;
#endif
}

std::optional<BinaryString> least_value_extension(const MartingaleView& m,
                                                  const BinaryString& base, size_t len,
                                                  const Int& bound) {
  if (openmp_enabled() && len - base.size() >= kParallelGap) {
    return least_value_extension_parallel(m, base, len, bound);
  }
  return least_value_extension_serial(m, base, len, bound);
}

namespace {

// Lex-least string of length len extending prefix that is not in `visited`
// (when excluding). nullopt if the whole cone is visited.
std::optional<BinaryString> least_unvisited(const BinaryString& prefix, size_t len,
                                            const StringSet& visited, bool exclude) {
  BinaryString cand = prefix;
  while (cand.size() < len) cand.push_back(0);
  if (!exclude) return cand;
  while (visited.count(cand)) {
    // lex successor within the cone
    size_t i = cand.size();
    while (i > prefix.size() && cand.bit(i - 1) == 1) --i;
    if (i == prefix.size()) return std::nullopt;  // cone exhausted
    // set bit i-1 to 1, zero the tail
    BinaryString next = cand.prefix(i - 1);
    next.push_back(1);
    while (next.size() < len) next.push_back(0);
    cand = next;
  }
  return cand;
}

// f(rho) = max over forbidden mu of lcp(rho, mu); min distance = len - f.
// DFS carries the indices of the forbidden strings that still agree with the
// current prefix; once the set empties, every completion shares the same f.
struct MaximinSearch {
  const std::vector<BinaryString>& forbidden;
  size_t len;
  const StringSet& visited;
  bool exclude;
  size_t best_f;  // len+1 sentinel; only strict improvements move it
  std::optional<BinaryString> best;

  void run(BinaryString& node, std::vector<uint32_t>& active, size_t floor_f) {
    if (active.empty()) {
      if (floor_f < best_f) {
        if (auto cand = least_unvisited(node, len, visited, exclude)) {
          best_f = floor_f;
          best = *cand;
        }
      }
      return;
    }
    if (node.size() == len) {
      // node equals a forbidden string (f == len); eligible all the same
      if (len < best_f && (!exclude || !visited.count(node))) {
        best_f = len;
        best = node;
      }
      return;
    }
    if (node.size() >= best_f) return;  // cannot strictly improve below here
    for (int b = 0; b <= 1; ++b) {
      std::vector<uint32_t> next;
      next.reserve(active.size());
      for (uint32_t idx : active) {
        if (forbidden[idx].bit(node.size()) == b) next.push_back(idx);
      }
      node.push_back(b);
      // everything still active agreed to depth node.size()-1; if it all
      // drops here, that is the deepest agreement any completion can have
      size_t child_floor = next.empty() ? node.size() - 1 : floor_f;
      run(node, next, child_floor);
      node.pop_back();
    }
  }
};

}  // namespace

std::optional<MaximinOutcome> maximin_pruned(const std::vector<BinaryString>& forbidden,
                                             const BinaryString& base, size_t len,
                                             const StringSet& visited, bool require_unvisited) {
  assert(len >= base.size());
  std::vector<uint32_t> active;
  for (uint32_t i = 0; i < forbidden.size(); ++i) {
    assert(forbidden[i].size() == len);
    if (common_prefix_len(forbidden[i], base) == base.size()) active.push_back(i);
  }
  // strings diverging from base cannot matter more than in-cone ones unless
  // the cone is clean; their lcp with any candidate is a constant
  size_t base_floor = 0;
  for (uint32_t i = 0; i < forbidden.size(); ++i) {
    if (common_prefix_len(forbidden[i], base) < base.size()) {
      base_floor = std::max(base_floor, common_prefix_len(forbidden[i], base));
    }
  }
  MaximinSearch s{forbidden, len, visited, require_unvisited, len + 1, std::nullopt};
  BinaryString node = base;
  s.run(node, active, base_floor);
  if (!s.best) return std::nullopt;
  size_t f = s.best_f;
  if (forbidden.empty()) return MaximinOutcome{*s.best, SIZE_MAX};
  return MaximinOutcome{*s.best, len - f};
}

namespace {

// Reference: scan every completion, score it against the whole forbidden
// list, keep the (max distance, lex-least) winner. The candidate buffer is
// incremented in place; one allocation per range, not per candidate.
std::optional<MaximinOutcome> maximin_scan_range(const std::vector<BinaryString>& forbidden,
                                                 const BinaryString& base, size_t len,
                                                 const StringSet& visited, bool exclude,
                                                 uint64_t from, uint64_t to) {
  size_t gap = len - base.size();
  std::optional<MaximinOutcome> best;
  BinaryString cand = with_suffix_bits(base, from, gap);
  for (uint64_t x = from; x < to; ++x) {
    if (x != from) {
      // binary +1 on the suffix
      size_t i = len;
      while (cand.bit(i - 1) == 1) {
        cand.pop_back();
        --i;
      }
      cand.flip_last();
      while (cand.size() < len) cand.push_back(0);
    }
    if (exclude && visited.count(cand)) continue;
    size_t f = 0;
    for (const auto& mu : forbidden) f = std::max(f, common_prefix_len(cand, mu));
    size_t dist = forbidden.empty() ? SIZE_MAX : len - f;
    if (!best || dist > best->min_distance) best = MaximinOutcome{cand, dist};
  }
  return best;
}

}  // namespace

std::optional<MaximinOutcome> maximin_enumerate_serial(
    const std::vector<BinaryString>& forbidden, const BinaryString& base, size_t len,
    const StringSet& visited, bool require_unvisited) {
  size_t gap = len - base.size();
  if (gap >= 63) throw std::invalid_argument("maximin_enumerate: gap too large");
  return maximin_scan_range(forbidden, base, len, visited, require_unvisited, 0,
                            uint64_t(1) << gap);
}

std::optional<MaximinOutcome> maximin_enumerate_parallel(
    const std::vector<BinaryString>& forbidden, const BinaryString& base, size_t len,
    const StringSet& visited, bool require_unvisited) {
#ifndef _OPENMP
  return maximin_enumerate_serial(forbidden, base, len, visited, require_unvisited);
#else
  size_t gap = len - base.size();
  if (gap >= 63) throw std::invalid_argument("maximin_enumerate: gap too large");
  if (gap < kParallelGap) {
    return maximin_enumerate_serial(forbidden, base, len, visited, require_unvisited);
  }
  uint64_t total = uint64_t(1) << gap;
  uint64_t nblocks = uint64_t(1) << kSplitBits;
  uint64_t per = total / nblocks;
  std::vector<std::optional<MaximinOutcome>> part(nblocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (uint64_t blk = 0; blk < nblocks; ++blk) {
    part[blk] = maximin_scan_range(forbidden, base, len, visited, require_unvisited, blk * per,
                                   (blk + 1) * per);
  }
  std::optional<MaximinOutcome> best;
  for (const auto& p : part) {
    if (!p) continue;
    if (!best || p->min_distance > best->min_distance) best = p;
  }
  return best;
#endif
}

std::vector<uint32_t> move_bound_table_serial(uint64_t kmax) {
  std::vector<uint32_t> out(kmax + 1);
  for (uint64_t k = 0; k <= kmax; ++k) {
    if (k == 0) {
      out[0] = 0;  // convention: no capital cannot move
      continue;
    }
    uint32_t n = 0;
    // k - (2^n - 1) < k/2  <=>  k < 2^(n+1) - 2, exactly in integers
    while (!(k < (uint64_t(1) << (n + 1)) - 2)) ++n;
    out[k] = n;
  }
  return out;
}

std::vector<uint32_t> move_bound_table_parallel(uint64_t kmax) {
#ifndef _OPENMP
  return move_bound_table_serial(kmax);
#else
  std::vector<uint32_t> out(kmax + 1);
  out[0] = 0;
#pragma omp parallel for schedule(static)
  for (uint64_t k = 1; k <= kmax; ++k) {
    uint32_t n = 0;
    while (!(k < (uint64_t(1) << (n + 1)) - 2)) ++n;
    out[k] = n;
  }
  return out;
#endif
}

}  // namespace ivr::search
