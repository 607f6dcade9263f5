#include <cmath>
#include <numeric>

#include "coalab/hash.hpp"
#include "coalab/rng.hpp"
#include "doctest.h"

using namespace coalab;

TEST_CASE("sha256 matches published test vectors") {
  CHECK(to_hex(sha256(std::string_view(""))) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(sha256(std::string_view("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("hex round trip and malformed input") {
  const Digest d = sha256(std::string_view("round trip"));
  CHECK(digest_from_hex(to_hex(d)) == d);
  CHECK_THROWS(digest_from_hex("abc"));
  CHECK_THROWS(digest_from_hex(std::string(64, 'z')));
}

TEST_CASE("digest helpers read big-endian prefixes") {
  Digest d{};
  d[0] = 0x80;
  CHECK(leading_u64(d) == 0x8000000000000000ULL);
  CHECK(digest_fraction(d) == doctest::Approx(0.5));
  CHECK(digest_mod(d, 7) < 7);
  CHECK_THROWS(digest_mod(d, 0));
}

TEST_CASE("byte writer and reader agree") {
  ByteWriter w;
  const Digest d = sha256(std::string_view("x"));
  w.u8(7).u32(0xdeadbeef).u64(1ULL << 60).i64(-42).boolean(true).digest(d);
  ByteReader r(w.data());
  CHECK(r.u8() == 7);
  CHECK(r.u32() == 0xdeadbeef);
  CHECK(r.u64() == (1ULL << 60));
  CHECK(r.i64() == -42);
  CHECK(r.boolean());
  CHECK(r.digest() == d);
  CHECK(r.done());
  CHECK_THROWS(r.u8());
}

TEST_CASE("domain tags separate otherwise equal payloads") {
  ByteWriter a, b;
  a.tag("one").u64(1);
  b.tag("two").u64(1);
  CHECK(a.hash() != b.hash());
}

TEST_CASE("rng is deterministic per (seed, stream) and streams differ") {
  Rng a(5, 1), b(5, 1), c(5, 2);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  Rng f = Rng(9).fork(3);
  Rng g = Rng(9).fork(3);
  CHECK(f.next() == g.next());
}

TEST_CASE("rng distributions have the right first moments") {
  Rng r(17);
  const int n = 200000;
  double su = 0, se = 0, sg = 0;
  std::vector<int> counts(10, 0);
  for (int i = 0; i < n; ++i) {
    su += r.uniform();
    se += r.exponential(3.0);
    sg += static_cast<double>(r.geometric(0.25));
    ++counts[r.below(10)];
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(se / n == doctest::Approx(3.0).epsilon(0.02));
  CHECK(sg / n == doctest::Approx(3.0).epsilon(0.02));  // failures before success: (1-p)/p
  for (int c : counts) CHECK(std::abs(c - n / 10) < 5 * std::sqrt(n * 0.09));
  CHECK_THROWS(r.below(0));
}
