#pragma once

#include <optional>
#include <vector>

#include "ivr/martingale.hpp"

namespace ivr {

// Cone forcing against a bounded-capital bettor: walk down the tree always
// taking a child whose value does not exceed the parent's.
struct ForcingResult {
  BinaryString path;               // the constructed extension (start included)
  std::vector<Int> capital_trace;  // adversary value along path prefixes, nonincreasing
  uint64_t strict_decreases = 0;
};

class PartialAdversaryError : public std::runtime_error {
 public:
  explicit PartialAdversaryError(const BinaryString& node)
      : std::runtime_error("partial adversary: undefined at " +
                           (node.empty() ? std::string("(empty)") : node.text())) {}
};

class NotConvergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Extends start bit-by-bit for `depth` steps, preferring bit 0 on ties.
// Throws PartialAdversaryError if the adversary is undefined in the cone.
ForcingResult greedy_force(const MartingaleView& adversary, const BinaryString& start,
                           size_t depth);

// The (length,lex)-least tau >= sigma of length h with value(tau) <= value(sigma).
// Throws NotConvergedError unless the adversary is defined on all strings of
// length h. Existence is the martingale averaging property.
BinaryString least_decreasing_extension(const MartingaleView& adversary,
                                        const BinaryString& sigma, size_t h);

struct HatTrajectory {
  std::vector<BinaryString> values;  // values[s], s = 0..budget; values[0] == sigma
  uint64_t change_count = 0;
};

// Staged least-decreasing-extension search: at stage s+1, if the value at the
// current string is defined and some extension of it of length <= s+1 has a
// strictly smaller defined value, move to the (length,lex)-least such string.
HatTrajectory hat_operator(const MartingaleTable& adversary, const BinaryString& sigma,
                           Stage budget);

// True iff capital k suffices for the escalation schedule 1,2,...,n-1 then
// all-remaining with a net gain on failure: k > (n-1)*n.
bool escalation_feasible(const Int& k, const Int& n);

// Literal schedule recursion: h(0)=1, h(n) = max{ m : (m-1)m < h(n-1)+1 }.
// Constantly 1; kept literal on purpose. h_alt is the least feasible capital
// for n escalation steps, provided for experiments.
Int compute_h(uint64_t n);
Int h_alt(const Int& n);

}  // namespace ivr
