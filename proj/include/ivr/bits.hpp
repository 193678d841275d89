#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ivr {

// Finite binary word. Stored as one byte per bit so the empty word and
// leading zeros are first-class; every construction manipulates prefixes
// positionally.
class BinaryString {
 public:
  BinaryString() = default;
  explicit BinaryString(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}

  static BinaryString from_text(std::string_view text);
  static BinaryString zeros(size_t n) { return BinaryString(std::vector<uint8_t>(n, 0)); }
  static BinaryString ones(size_t n) { return BinaryString(std::vector<uint8_t>(n, 1)); }

  size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int bit(size_t i) const { return bits_[i]; }

  void push_back(int b) { bits_.push_back(static_cast<uint8_t>(b & 1)); }
  void pop_back() { bits_.pop_back(); }
  void flip_last() { bits_.back() ^= 1; }

  BinaryString prefix(size_t n) const;
  BinaryString child(int b) const;
  bool is_prefix_of(const BinaryString& other) const;

  std::string text() const;

  bool operator==(const BinaryString& other) const = default;

  // Lexicographic; only meaningful between words of equal length.
  bool lex_less(const BinaryString& other) const;
  // Total order: first by length, then lexicographically.
  bool lenlex_less(const BinaryString& other) const;

 private:
  std::vector<uint8_t> bits_;
};

struct LenLexLess {
  bool operator()(const BinaryString& a, const BinaryString& b) const {
    return a.lenlex_less(b);
  }
};

using StringSet = std::set<BinaryString, LenLexLess>;

// Last-bit flip. sibling(sibling(s)) == s.
BinaryString sibling(const BinaryString& s);

// For |a| == |b| == l: l minus the length of the longest common prefix.
size_t distance(const BinaryString& a, const BinaryString& b);

size_t common_prefix_len(const BinaryString& a, const BinaryString& b);

// Minimum under (length, lex).
const BinaryString& least_string(const StringSet& candidates);

// stem followed by tail_bit repeated forever; prefix extraction is total.
struct TailSequence {
  BinaryString stem;
  int tail_bit = 1;

  BinaryString prefix(size_t n) const;
  int bit(size_t i) const { return i < stem.size() ? stem.bit(i) : tail_bit; }
  bool operator==(const TailSequence&) const = default;
};

}  // namespace ivr
