#include "ivr/forcing.hpp"

#include "ivr/search.hpp"

namespace ivr {

ForcingResult greedy_force(const MartingaleView& adversary, const BinaryString& start,
                           size_t depth) {
  ForcingResult out;
  auto v = adversary.value(start);
  if (!v) {
    for (size_t n = 0; n <= start.size(); ++n) {
      if (!adversary.value(start.prefix(n))) throw PartialAdversaryError(start.prefix(n));
    }
  }
  BinaryString node = start;
  Int value = *v;
  out.capital_trace.push_back(value);
  for (size_t i = 0; i < depth; ++i) {
    auto w = adversary.wager(node);
    if (!w) throw PartialAdversaryError(node);
    // child on the stake side gains, the other loses; neutral ties prefer 0
    int bit = *w > 0 ? 0 : (*w < 0 ? 1 : 0);
    Int next = bit == 1 ? Int(value + *w) : Int(value - *w);
    if (next < value) ++out.strict_decreases;
    node.push_back(bit);
    value = next;
    out.capital_trace.push_back(value);
  }
  out.path = node;
  return out;
}

BinaryString least_decreasing_extension(const MartingaleView& adversary,
                                        const BinaryString& sigma, size_t h) {
  if (h < sigma.size()) throw NotConvergedError("h shorter than sigma");
  if (!adversary.total_to_length(h)) {
    throw NotConvergedError("not converged to length " + std::to_string(h));
  }
  auto bound = adversary.value(sigma);
  if (!bound) throw NotConvergedError("value undefined at sigma");
  auto tau = search::least_value_extension(adversary, sigma, h, *bound);
  if (!tau) {
    // impossible for a valid martingale: averaging guarantees a witness
    throw std::logic_error("no non-increasing extension: adversary violates fairness");
  }
  return *tau;
}

namespace {

// (length,lex)-least tau extending base, |tau| <= maxlen, defined with
// value < bound at the given stage. Values are integers, so value < bound
// is exactly value <= bound-1.
std::optional<BinaryString> least_defined_below(const MartingaleView& m,
                                                const BinaryString& base, size_t maxlen,
                                                const Int& bound) {
  Int strict = bound - 1;
  for (size_t len = base.size(); len <= maxlen; ++len) {
    if (auto tau = search::least_value_extension(m, base, len, strict)) return tau;
  }
  return std::nullopt;
}

}  // namespace

HatTrajectory hat_operator(const MartingaleTable& adversary, const BinaryString& sigma,
                           Stage budget) {
  HatTrajectory out;
  out.values.reserve(budget + 1);
  out.values.push_back(sigma);
  BinaryString current = sigma;
  for (Stage s = 1; s <= budget; ++s) {
    MartingaleView m(adversary, s);
    auto v = m.value(current);
    if (v) {
      if (auto tau = least_defined_below(m, current, s, *v)) {
        if (!(*tau == current)) {
          current = *tau;
          ++out.change_count;
        }
      }
    }
    out.values.push_back(current);
  }
  return out;
}

bool escalation_feasible(const Int& k, const Int& n) { return k > (n - 1) * n; }

Int compute_h(uint64_t n) {
  Int h = 1;  // h(0)
  for (uint64_t i = 1; i <= n; ++i) {
    Int target = h + 1;
    Int m = 1;
    while ((m - 1) * m < target) ++m;
    h = m - 1;  // greatest m with (m-1)m < h(i-1)+1
  }
  return h;
}

Int h_alt(const Int& n) { return (n - 1) * n + 1; }

}  // namespace ivr
