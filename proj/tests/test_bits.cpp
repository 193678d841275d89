#include "doctest.h"

#include "ivr/bits.hpp"
#include "oracles.hpp"

using namespace ivr;

namespace {
BinaryString bs(const char* s) { return BinaryString::from_text(s); }
}  // namespace

TEST_CASE("sibling flips the last bit") {
  CHECK(sibling(bs("0")) == bs("1"));
  CHECK(sibling(bs("10")) == bs("11"));
  CHECK(sibling(bs("011")) == bs("010"));
  CHECK_THROWS(sibling(BinaryString()));
}

TEST_CASE("sibling is an involution differing exactly at the last position") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    size_t len = 1 + rng.below(16);
    BinaryString s;
    for (size_t i = 0; i < len; ++i) s.push_back(static_cast<int>(rng.below(2)));
    BinaryString sib = sibling(s);
    CHECK(sibling(sib) == s);
    CHECK(distance(s, sib) == 1);
    CHECK(common_prefix_len(s, sib) == len - 1);
  }
}

TEST_CASE("distance examples") {
  CHECK(distance(bs("0101"), bs("0111")) == 2);
  CHECK(distance(bs("0110"), bs("0110")) == 0);
  CHECK(distance(bs("000"), bs("111")) == 3);
  CHECK_THROWS(distance(bs("01"), bs("011")));
}

TEST_CASE("distance is a metric on fixed-length strings") {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    size_t len = 1 + rng.below(10);
    auto mk = [&] {
      BinaryString s;
      for (size_t i = 0; i < len; ++i) s.push_back(static_cast<int>(rng.below(2)));
      return s;
    };
    BinaryString a = mk(), b = mk(), c = mk();
    CHECK(distance(a, b) == distance(b, a));
    CHECK((distance(a, b) == 0) == (a == b));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c));
    CHECK(distance(a, b) <= len);
  }
}

TEST_CASE("least_string picks the (length, lex) minimum") {
  CHECK(least_string({bs("10"), bs("0")}) == bs("0"));
  CHECK(least_string({bs("01"), bs("10")}) == bs("01"));
  CHECK(least_string({bs("110"), bs("111"), bs("10")}) == bs("10"));
  CHECK_THROWS(least_string(StringSet{}));
}

TEST_CASE("least_string removal yields a strictly larger next element") {
  oracle::Rng rng(13);
  StringSet set;
  for (int i = 0; i < 40; ++i) {
    size_t len = rng.below(8);
    BinaryString s;
    for (size_t j = 0; j < len; ++j) s.push_back(static_cast<int>(rng.below(2)));
    set.insert(s);
  }
  while (set.size() > 1) {
    BinaryString first = least_string(set);
    set.erase(first);
    CHECK(first.lenlex_less(least_string(set)));
  }
}

TEST_CASE("tail sequence prefixes") {
  TailSequence x{bs("10"), 1};
  CHECK(x.prefix(4) == bs("1011"));
  CHECK(TailSequence{BinaryString(), 1}.prefix(3) == bs("111"));
  CHECK((TailSequence{bs("01"), 1}.prefix(1) == bs("0")));
  CHECK(x.prefix(0) == BinaryString());
}

TEST_CASE("tail sequence prefixes are monotone") {
  oracle::Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    size_t len = rng.below(6);
    BinaryString stem;
    for (size_t j = 0; j < len; ++j) stem.push_back(static_cast<int>(rng.below(2)));
    TailSequence x{stem, static_cast<int>(rng.below(2))};
    size_t n = rng.below(10), m = n + rng.below(10);
    CHECK(x.prefix(n).is_prefix_of(x.prefix(m)));
  }
}
