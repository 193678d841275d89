#include "ivr/levels.hpp"

#include <algorithm>
#include <cassert>

#include "ivr/search.hpp"

namespace ivr {

const char* variant_name(LevelVariant v) {
  switch (v) {
    case LevelVariant::Plain:
      return "plain";
    case LevelVariant::Coding:
      return "coding";
    case LevelVariant::Pivr:
      return "pivr";
  }
  return "?";
}

std::optional<LevelVariant> variant_from_name(const std::string& name) {
  if (name == "plain") return LevelVariant::Plain;
  if (name == "coding") return LevelVariant::Coding;
  if (name == "pivr") return LevelVariant::Pivr;
  return std::nullopt;
}

Int forbidden_bound(size_t i, LevelVariant variant) {
  Int sum = 0;
  Int fac;
  for (size_t j = 0; j <= i; ++j) {
    mpz_fac_ui(fac.get_mpz_t(), static_cast<unsigned long>(j + 1));
    switch (variant) {
      case LevelVariant::Plain:
        sum += fac;
        break;
      case LevelVariant::Coding:
        sum += 2 * fac + 1;
        break;
      case LevelVariant::Pivr:
        throw std::invalid_argument("pivr forbidden bound is table-dependent (2^d_i)");
    }
  }
  return sum;
}

namespace {

size_t ceil_log2(const Int& t) {
  assert(t >= 1);
  size_t bits = mpz_sizeinbase(t.get_mpz_t(), 2);  // floor(log2 t) + 1
  bool pow2 = mpz_popcount(t.get_mpz_t()) == 1;
  return pow2 ? bits - 1 : bits;
}

}  // namespace

size_t move_bound(const Int& k) {
  if (k == 0) return 0;
  // k - (2^n - 1) < k/2  <=>  2^(n+1) >= k + 3
  return ceil_log2(k + 3) - 1;
}

size_t gap_exponent(const Int& f) {
  if (f < 1) throw std::invalid_argument("gap_exponent requires f >= 1");
  return ceil_log2(f);
}

size_t LevelTable::level_len(size_t i) const {
  if (i >= l.size()) throw std::out_of_range("level index beyond table");
  if (!l[i].fits_ulong_p() || l[i].get_ui() > (uint64_t(1) << 24)) {
    throw LevelOverflowError(i);
  }
  return static_cast<size_t>(l[i].get_ui());
}

Int LevelTable::forbidden_limit(size_t i) const {
  if (variant == LevelVariant::Pivr) {
    Int out;
    if (!d[i].fits_ulong_p()) throw LevelOverflowError(i);
    mpz_ui_pow_ui(out.get_mpz_t(), 2, d[i].get_ui());
    return out;
  }
  return forbidden_bound(i, variant);
}

LevelTable build_levels(LevelVariant variant, std::vector<Int> capitals, size_t count,
                        size_t max_exponent) {
  if (capitals.empty()) throw std::invalid_argument("build_levels: no capitals");
  if (count < 1) throw std::invalid_argument("build_levels: count must be >= 1");
  LevelTable t;
  t.variant = variant;
  t.capitals = std::move(capitals);
  t.l = {Int(0)};
  t.d = {Int(0)};
  t.intermediate = {{}};
  t.f = {Int(0)};  // index 0 placeholder; bounds start at step 1

  auto pow2 = [&](const Int& e) {
    if (!e.fits_ulong_p() || e.get_ui() > max_exponent) {
      throw LevelOverflowError(t.l.size());
    }
    Int out;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, e.get_ui());
    return out;
  };

  for (size_t step = 1; step <= count; ++step) {
    size_t i = step - 1;
    if (variant == LevelVariant::Pivr && step == 1) {
      t.l.push_back(5);  // the choice of l_1 is not significant
      t.d.push_back(Int(5) * pow2(Int(5)));
      t.intermediate.push_back({});
      t.f.push_back(pow2(t.d[0]));
      continue;
    }
    Int fbound = variant == LevelVariant::Pivr ? pow2(t.d[i]) : forbidden_bound(i, variant);
    std::vector<Int> grid;
    if (variant == LevelVariant::Pivr) {
      grid.push_back(t.l[i] + t.d[i]);
    } else {
      grid.push_back(t.l[i] + Int(gap_exponent(fbound)));
    }
    for (size_t j = 0; j <= i; ++j) {
      size_t best = 0;
      for (size_t k = 0; k <= i && k < t.capitals.size(); ++k) {
        best = std::max(best, move_bound(pow2(grid[j] + 1) * t.capitals[k]));
      }
      grid.push_back(grid[j] + Int(best));
    }
    t.l.push_back(grid.back() + 1);
    if (variant == LevelVariant::Pivr) {
      t.d.push_back(t.l[step] * pow2(t.l[step]));
    } else if (variant == LevelVariant::Plain) {
      Int sum = 0, fac;
      for (size_t j = 0; j <= i; ++j) {
        mpz_fac_ui(fac.get_mpz_t(), static_cast<unsigned long>(j + 1));
        sum += fac;
      }
      t.d.push_back(t.d[i] + sum);
    } else {
      Int fac;
      mpz_fac_ui(fac.get_mpz_t(), static_cast<unsigned long>(step));
      t.d.push_back(t.d[i] + 2 * fac + 1 + 1);
    }
    t.intermediate.push_back(std::move(grid));
    t.f.push_back(fbound);
  }
  return t;
}

bool ForbiddenRegistry::insert(size_t level, const BinaryString& value, Stage stage,
                               std::string cause) {
  if (table_) {
    size_t want = table_->level_len(level);
    if (value.size() != want) {
      throw std::invalid_argument("register_forbidden: string length " +
                                  std::to_string(value.size()) + " != l_" +
                                  std::to_string(level) + " = " + std::to_string(want));
    }
  }
  auto [it, added] = by_level_[level].insert(value);
  if (!added) return false;
  entries_.push_back({level, value, stage, std::move(cause)});
  if (table_ && level >= 1) {
    BinaryString prefix = value.prefix(table_->level_len(level - 1));
    Int count(static_cast<unsigned long>(count_above(level, prefix)));
    Int bound = table_->forbidden_limit(level - 1);
    if (count > bound) violations_.push_back({level, prefix, count, bound});
  }
  return added;
}

const StringSet& ForbiddenRegistry::at_level(size_t level) const {
  static const StringSet kEmpty;
  auto it = by_level_.find(level);
  return it == by_level_.end() ? kEmpty : it->second;
}

std::vector<BinaryString> ForbiddenRegistry::of_length(size_t len,
                                                       const BinaryString* extending) const {
  std::vector<BinaryString> out;
  for (const auto& [lvl, set] : by_level_) {
    for (const auto& s : set) {
      if (s.size() != len) continue;
      if (extending && common_prefix_len(s, *extending) < extending->size()) continue;
      out.push_back(s);
    }
  }
  return out;
}

size_t ForbiddenRegistry::count_above(size_t level, const BinaryString& prefix) const {
  size_t n = 0;
  for (const auto& s : at_level(level)) {
    if (prefix.is_prefix_of(s)) ++n;
  }
  return n;
}

BinaryString maximin_select(const ForbiddenRegistry& reg, const BinaryString& base,
                            size_t target_len, const StringSet& visited, bool require_unvisited,
                            const BinaryString* forbidden_cone, size_t enumeration_cap) {
  if (target_len < base.size()) throw std::invalid_argument("maximin_select: target too short");
  std::vector<BinaryString> forbidden = reg.of_length(target_len, forbidden_cone);
  std::optional<search::MaximinOutcome> out;
  if (target_len - base.size() <= enumeration_cap) {
    out = search::maximin_enumerate_parallel(forbidden, base, target_len, visited,
                                             require_unvisited);
  } else {
    out = search::maximin_pruned(forbidden, base, target_len, visited, require_unvisited);
  }
  if (!out) throw ConeExhaustedError();
  return out->choice;
}

}  // namespace ivr
