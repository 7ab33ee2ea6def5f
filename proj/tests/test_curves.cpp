#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ktest;

TEST(Curves, TraceExamples) {
  auto E = curve("11a1");
  EXPECT_EQ(trace_of_frobenius(E, 2), -2);
  EXPECT_EQ(brute_trace(E, 2), -2);
  EXPECT_EQ(trace_of_frobenius(E, 11), 1);  // split multiplicative
  EXPECT_THROW(trace_of_frobenius(E, 12), InputError);
}

TEST(Curves, BadReductionTypes) {
  // 14a1: 2 and 7 multiplicative; a_2 = -1, a_7 = 1 (check against the Hasse-free formula q + 1 - #E_ns)
  auto E = curve("14a1");
  for (std::uint64_t q : {2ULL, 7ULL}) {
    auto a = trace_of_frobenius(E, q);
    EXPECT_TRUE(a == 1 || a == -1);
    // for multiplicative reduction the nonsingular points number q - a_q, and the node adds one
    EXPECT_EQ(static_cast<std::int64_t>(brute_count(E, q)) - 1, static_cast<std::int64_t>(q) - a);
  }
  // additive: y^2 = x^3 + 1 has conductor 36 and additive reduction at 2 and 3
  EllipticCurve A("36a1", {0, 0, 0, 0, 1}, 36);
  EXPECT_EQ(trace_of_frobenius(A, 2), 0);
  EXPECT_EQ(trace_of_frobenius(A, 3), 0);
}

TEST(Curves, BsgsMatchesEnumeration) {
  std::mt19937_64 rng(7);
  for (const char* label : {"11a1", "37a1", "389a1"}) {
    auto E = curve(label);
    auto primes = arith::primes_up_to(100000);
    std::vector<std::uint64_t> pool;
    for (auto q : primes)
      if (q >= 1000 && E.is_good(q)) pool.push_back(q);
    for (int i = 0; i < 30; ++i) {
      auto q = pool[rng() % pool.size()];
      EXPECT_EQ(count_points_bsgs(E, q), count_points_naive(E, q)) << label << " q=" << q;
    }
  }
}

TEST(Curves, NaiveMatchesBruteForce) {
  auto E = curve("37a1");
  for (auto q : arith::primes_up_to(400))
    if (E.is_good(q)) {
      EXPECT_EQ(trace_of_frobenius(E, q), brute_trace(E, q)) << q;
    }
}

TEST(Curves, TwistRelation) {
  std::vector<std::pair<std::string, std::int64_t>> pairs = {{"11a1", -7}, {"11a1", -8}, {"37a1", -3}, {"15a1", -23}, {"17a1", -4}};
  for (auto& [label, D] : pairs) {
    auto E = curve(label);
    auto EK = quadratic_twist(E, D);
    EXPECT_EQ(EK.conductor(), E.conductor() * static_cast<std::uint64_t>(D * D));
    for (auto q : arith::primes_up_to(1000)) {
      if (!E.is_good(q) || static_cast<std::uint64_t>(-D) % q == 0) continue;
      EXPECT_EQ(trace_of_frobenius(EK, q), quadratic_character(D, q) * trace_of_frobenius(E, q)) << label << " " << D << " q=" << q;
    }
  }
  // independent point count of the twisted model at q = 3
  auto E = curve("11a1");
  auto EK = quadratic_twist(E, -7);
  EXPECT_EQ(brute_trace(EK, 3), arith::kronecker(-7, 3) * brute_trace(E, 3));
}

TEST(Curves, TwistIsInvolution) {
  auto E = curve("37a1");
  auto back = quadratic_twist(quadratic_twist(E, -3), -3, E.conductor());
  EXPECT_TRUE(isomorphic(E, back));
  int checked = 0;
  for (auto q : arith::primes_up_to(2000)) {
    if (!E.is_good(q) || q == 3) continue;
    EXPECT_EQ(trace_of_frobenius(back, q), trace_of_frobenius(E, q));
    if (++checked == 100) break;
  }
  EXPECT_EQ(checked, 100);
  EXPECT_THROW(quadratic_twist(E, -12), InputError);
}

TEST(Curves, TwistRamifiedPrime) {
  auto EK = quadratic_twist(curve("11a1"), -7);
  EXPECT_EQ(trace_of_frobenius(EK, 7), 0);
}

TEST(Curves, HasseBound) {
  for (const char* label : {"11a1", "37a1"}) {
    auto E = curve(label);
    for (auto q : arith::primes_up_to(10000)) {
      if (!E.is_good(q)) continue;
      auto a = trace_of_frobenius(E, q);
      ASSERT_LE(static_cast<double>(a) * static_cast<double>(a), 4.0 * static_cast<double>(q)) << label << " q=" << q;
    }
  }
}

TEST(Curves, SplitConductor) {
  auto s = split_conductor(11, -7);
  EXPECT_EQ(s.n_plus, 11u);
  EXPECT_EQ(s.n_minus, 1u);
  EXPECT_EQ(s.nu_minus, 0);
  EXPECT_EQ(arith::legendre(-7, 11), 1);
  auto one = split_conductor(1, -7);
  EXPECT_EQ(one.n_plus, 1u);
  EXPECT_EQ(one.n_minus, 1u);
  // -11: 2 and 7 are both inert
  EXPECT_EQ(arith::kronecker(-11, 2), -1);
  EXPECT_EQ(arith::kronecker(-11, 7), -1);
  auto s14 = split_conductor(14, -11);
  EXPECT_EQ(s14.nu_minus, 2);
  EXPECT_EQ(s14.n_plus * s14.n_minus, 14u);
  EXPECT_THROW(split_conductor(14, -7), InvariantError);  // 7 ramified
  EXPECT_THROW(split_conductor(11, -3, 3), HypothesisError);
}

TEST(Curves, SplitConductorMatchesKronecker) {
  for (std::uint64_t N : {11ULL, 15ULL, 37ULL, 43ULL, 53ULL}) {
    for (std::int64_t D : {-3LL, -4LL, -7LL, -8LL, -11LL, -23LL, -31LL}) {
      bool ramified = false;
      for (auto q : arith::prime_divisors(N)) ramified |= arith::kronecker(D, q) == 0;
      if (ramified) continue;
      auto s = split_conductor(N, D);
      EXPECT_EQ(s.n_plus * s.n_minus, N);
      for (auto q : arith::prime_divisors(s.n_plus)) EXPECT_EQ(arith::kronecker(D, q), 1);
      for (auto q : arith::prime_divisors(s.n_minus)) EXPECT_EQ(arith::kronecker(D, q), -1);
      EXPECT_EQ(static_cast<std::size_t>(s.nu_minus), arith::prime_divisors(s.n_minus).size());
    }
  }
}

TEST(Curves, ConductorSupportChecked) {
  EXPECT_THROW(EllipticCurve("bad", {0, -1, 1, -10, -20}, 13), InputError);
  EXPECT_THROW(EllipticCurve("sing", {0, 0, 0, 0, 0}, 1), InputError);
}
