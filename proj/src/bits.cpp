#include "ivr/bits.hpp"

#include <algorithm>

namespace ivr {

BinaryString BinaryString::from_text(std::string_view text) {
  std::vector<uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("binary string may contain only '0'/'1', got: " +
                                  std::string(text));
    }
    bits.push_back(static_cast<uint8_t>(c - '0'));
  }
  return BinaryString(std::move(bits));
}

BinaryString BinaryString::prefix(size_t n) const {
  if (n > bits_.size()) throw std::out_of_range("prefix longer than string");
  return BinaryString(std::vector<uint8_t>(bits_.begin(), bits_.begin() + static_cast<long>(n)));
}

BinaryString BinaryString::child(int b) const {
  BinaryString out = *this;
  out.push_back(b);
  return out;
}

bool BinaryString::is_prefix_of(const BinaryString& other) const {
  if (size() > other.size()) return false;
  return std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
}

std::string BinaryString::text() const {
  std::string out;
  out.reserve(bits_.size());
  for (uint8_t b : bits_) out.push_back(static_cast<char>('0' + b));
  return out;
}

bool BinaryString::lex_less(const BinaryString& other) const {
  return std::lexicographical_compare(bits_.begin(), bits_.end(), other.bits_.begin(),
                                      other.bits_.end());
}

bool BinaryString::lenlex_less(const BinaryString& other) const {
  if (size() != other.size()) return size() < other.size();
  return lex_less(other);
}

BinaryString sibling(const BinaryString& s) {
  if (s.empty()) throw std::invalid_argument("no sibling: empty string");
  BinaryString out = s;
  out.flip_last();
  return out;
}

size_t common_prefix_len(const BinaryString& a, const BinaryString& b) {
  size_t n = std::min(a.size(), b.size());
  size_t i = 0;
  while (i < n && a.bit(i) == b.bit(i)) ++i;
  return i;
}

size_t distance(const BinaryString& a, const BinaryString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance requires equal lengths");
  return a.size() - common_prefix_len(a, b);
}

const BinaryString& least_string(const StringSet& candidates) {
  if (candidates.empty()) throw std::invalid_argument("least_string: empty set");
  return *candidates.begin();
}

BinaryString TailSequence::prefix(size_t n) const {
  BinaryString out = n <= stem.size() ? stem.prefix(n) : stem;
  while (out.size() < n) out.push_back(tail_bit);
  return out;
}

}  // namespace ivr
