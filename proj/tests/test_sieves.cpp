#include <gtest/gtest.h>

#include "support.hpp"

using namespace ktest;

TEST(Sieves, CycMatchesBruteForce) {
  auto E = curve("11a1");
  auto got = sieve(Family::cyc, E, {}, 7, 1, 500);
  std::vector<std::uint64_t> expect;
  for (auto q : arith::primes_up_to(500)) {
    if (q == 7 || q == 11 || q % 7 != 1) continue;
    std::int64_t a = brute_trace(E, q);
    if (arith::mod(a - static_cast<std::int64_t>(q) - 1, 7) == 0) expect.push_back(q);
  }
  std::vector<std::uint64_t> qs;
  for (auto& kp : got) qs.push_back(kp.q);
  EXPECT_EQ(qs, expect);
  EXPECT_FALSE(expect.empty());
}

TEST(Sieves, RecheckValuations) {
  for (auto [label, p] : std::vector<std::pair<std::string, std::uint64_t>>{{"11a1", 7}, {"37a1", 5}}) {
    auto E = curve(label);
    for (auto& kp : sieve(Family::cyc, E, {}, p, 1, 3000)) {
      std::int64_t a = brute_trace(E, kp.q);
      EXPECT_EQ(kp.a_q, a);
      EXPECT_EQ(kp.v1, arith::valuation(static_cast<std::int64_t>(kp.q) - 1, p, kDefaultValuationCap));
      EXPECT_EQ(kp.v2, arith::valuation(a - static_cast<std::int64_t>(kp.q) - 1, p, kDefaultValuationCap));
      EXPECT_GE(std::min(kp.v1, kp.v2), 1);
      EXPECT_EQ(kp.exponent(), std::min(kp.v1, kp.v2));
    }
  }
}

TEST(Sieves, Nesting) {
  auto E = curve("37a1");
  auto k1 = sieve(Family::cyc, E, {}, 5, 1, 20000);
  auto k2 = sieve(Family::cyc, E, {}, 5, 2, 20000);
  EXPECT_FALSE(k2.empty());
  for (auto& kp : k2) {
    auto it = std::find_if(k1.begin(), k1.end(), [&](auto& x) { return x.q == kp.q; });
    ASSERT_NE(it, k1.end());
    EXPECT_EQ(*it, kp);
  }
  EXPECT_LT(k2.size(), k1.size());
}

TEST(Sieves, AnticyclotomicAndAdmissible) {
  auto E = curve("11a1");
  SieveContext ctx{-7};
  for (auto& kp : sieve(Family::ac, E, ctx, 7, 1, 3000)) {
    EXPECT_EQ(arith::kronecker(-7, kp.q), -1);
    EXPECT_GE(arith::valuation(static_cast<std::int64_t>(kp.q) + 1, 7), 1);
    EXPECT_EQ(arith::mod(brute_trace(E, kp.q), 7), 0);
  }
  auto adm = sieve(Family::adm, E, ctx, 7, 1, 3000);
  EXPECT_FALSE(adm.empty());
  for (auto& kp : adm) {
    EXPECT_EQ(arith::kronecker(-7, kp.q), -1);
    EXPECT_NE(kp.q % 7, 1u);
    EXPECT_NE(kp.q % 7, 6u);
    EXPECT_TRUE(kp.epsilon == 1 || kp.epsilon == -1);
    EXPECT_FALSE(kp.ambiguous);
    EXPECT_EQ(arith::mod(kp.a_q - kp.epsilon * static_cast<std::int64_t>(kp.q + 1), 7), 0);
  }
  EXPECT_TRUE(sieve(Family::ac, E, ctx, 7, 1, 10).empty());
  EXPECT_THROW(sieve(Family::ac, E, {}, 7, 1, 100), InputError);
}

TEST(Sieves, Preconditions) {
  auto E = curve("11a1");
  EXPECT_THROW(sieve(Family::cyc, E, {}, 3, 1, 100), InputError);
  EXPECT_THROW(sieve(Family::cyc, E, {}, 7, 0, 100), InputError);
  EXPECT_THROW(sieve(Family::cyc, E, {}, 7, 1, 1), InputError);
  EXPECT_THROW(parse_family("xyz"), InputError);
}

TEST(Sieves, Indices) {
  auto E = curve("37a1");
  auto primes = sieve(Family::cyc, E, {}, 5, 1, 3000);
  auto idx = build_indices(primes, 3, 10000000);
  ASSERT_FALSE(idx.empty());
  EXPECT_EQ(idx.front().n, 1u);
  EXPECT_TRUE(idx.front().t.is_infinite());
  for (auto& s : idx) {
    EXPECT_LE(s.n, 10000000u);
    EXPECT_TRUE(arith::is_squarefree(s.n));
    if (s.n == 1) continue;
    int t = std::numeric_limits<int>::max();
    std::uint64_t prod = 1;
    for (auto& f : s.factors) {
      t = std::min(t, f.exponent());
      prod *= f.q;
    }
    EXPECT_EQ(prod, s.n);
    EXPECT_EQ(s.t.value(), t);
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    EXPECT_TRUE(std::make_pair(idx[i - 1].nu(), idx[i - 1].n) < std::make_pair(idx[i].nu(), idx[i].n));
}

TEST(Sieves, ExponentMonotoneUnderExtension) {
  KolyvaginPrime a{101, Family::cyc, 3, 2}, b{151, Family::cyc, 1, 4}, c{251, Family::cyc, 2, 2};
  auto idx = build_indices({a, b, c}, 3, 1u << 30);
  std::map<std::uint64_t, int> t;
  for (auto& s : idx)
    if (s.n != 1) t[s.n] = s.t.value();
  EXPECT_EQ(t[101], 2);
  EXPECT_EQ(t[101 * 151], 1);
  EXPECT_EQ(t[101 * 251], 2);
  for (auto& [n, v] : t)
    for (auto& [m, w] : t)
      if (m % n == 0) {
        EXPECT_LE(w, v);
      }
}

TEST(Sieves, AdmissibleParity) {
  KolyvaginPrime a{3, Family::adm, 0, 1, 1}, b{5, Family::adm, 0, 1, -1};
  auto idx = build_indices({a, b}, 2, 1000, 1);
  for (auto& s : idx) {
    bool odd = (s.nu() + 1) % 2 == 1;
    EXPECT_EQ(s.parity, odd ? ParityClass::def : ParityClass::ind) << s.n;
  }
  EXPECT_EQ(idx[1].parity, ParityClass::ind);  // a single prime with nu(N^-) = 1
  EXPECT_THROW(build_indices({a, b}, 2, 1000), InputError);
}
