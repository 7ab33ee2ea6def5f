#include <gtest/gtest.h>

#include <numeric>

#include "partitions.hpp"
#include "support.hpp"

using namespace ktest;

namespace {

DeltaStats stats_from(int ord, std::map<int, int> partials) {
  DeltaStats st;
  for (auto& [i, v] : partials) {
    Stratum s;
    s.nu = i;
    s.count = s.nonzero = 1;
    s.value = v;
    st.strata[i] = s;
  }
  for (int i = 0; i < ord; ++i) {
    Stratum s;
    s.nu = i;
    s.count = 1;
    st.strata[i] = s;
  }
  st.ord = ord;
  st.ord_certified = true;
  int m = partials.begin()->second;
  for (auto& [i, v] : partials) m = std::min(m, v);
  st.partial_infty = m;
  return st;
}

ModuleShape shape(int corank, std::vector<int> e) { return ModuleShape{corank, std::move(e)}; }

}  // namespace

TEST(PredictQ, Examples) {
  auto trivial = predict_selmer_Q(stats_from(0, {{0, 0}}));
  EXPECT_EQ(trivial.shape, shape(0, {}));
  auto one = predict_selmer_Q(stats_from(0, {{0, 2}, {1, 1}, {2, 0}}));
  EXPECT_EQ(one.shape, shape(0, {1}));
  EXPECT_EQ(one.length_div_quotient, 2);
  EXPECT_EQ(one.shape.str(), "(Q_p/Z_p)^0 + (Z/p^1)^2");
  auto r1 = predict_selmer_Q(stats_from(1, {{1, 0}, {2, 0}, {3, 0}}));
  EXPECT_EQ(r1.shape, shape(1, {}));
  ASSERT_FALSE(r1.fitting.empty());
  EXPECT_FALSE(r1.fitting.front().exponent);  // Fitt_0 = 0 when the corank is positive
}

TEST(PredictQ, Diagnoses) {
  EXPECT_THROW(predict_selmer_Q(stats_from(0, {{0, 3}, {1, 2}, {2, 0}})), InconclusiveError);  // odd difference
  EXPECT_THROW(predict_selmer_Q(stats_from(0, {{0, 2}, {1, 2}, {2, 2}, {3, 0}})), InconclusiveError);  // flat then drop
  EXPECT_THROW(predict_selmer_Q(stats_from(0, {{0, 6}, {2, 4}, {4, 0}})), InconclusiveError);  // increasing exponents
  EXPECT_THROW(predict_selmer_Q(stats_from(0, {{0, 2}, {1, 0}})), InconclusiveError);  // partial^(2) missing
  DeltaStats none;
  EXPECT_THROW(predict_selmer_Q(none), InconclusiveError);
  auto uncertified = stats_from(1, {{1, 0}});
  uncertified.ord_certified = false;
  EXPECT_THROW(predict_selmer_Q(uncertified), InconclusiveError);
  try {
    predict_selmer_Q(stats_from(0, {{0, 3}, {2, 0}}));
    FAIL();
  } catch (const InconclusiveError& e) {
    EXPECT_NE(std::string(e.what()).find("search region too small or hypothesis failure"), std::string::npos);
    EXPECT_EQ(e.code(), ExitCode::inconclusive);
  }
}

TEST(PredictQ, StructureRoundTripExhaustive) {
  int count = 0;
  for (int corank = 0; corank <= 2; ++corank)
    for (auto& e : partitions_up_to(8))
      for (int base : {0, 3}) {
        auto pr = predict_selmer_Q(synthetic_stats(corank, e, base));
        EXPECT_EQ(pr.shape, shape(corank, e));
        EXPECT_EQ(pr.length_div_quotient, 2 * pr.shape.exponent_sum());
        ++count;
      }
  EXPECT_EQ(count, 3 * 67 * 2);  // 3 coranks x 67 partitions x 2 bases
}

TEST(CombineOverK, Bookkeeping) {
  EXPECT_EQ(combine_over_K(shape(1, {}), shape(0, {2})), shape(1, {2}));
  EXPECT_EQ(combine_over_K(shape(0, {}), shape(0, {})), shape(0, {}));
  auto parts = partitions_up_to(4);
  for (auto& a : parts)
    for (auto& b : parts) {
      auto A = shape(1, a), B = shape(0, b);
      auto AB = combine_over_K(A, B);
      EXPECT_EQ(AB, combine_over_K(B, A));
      EXPECT_EQ(AB.length(), A.length() + B.length());
      for (auto& c : {std::vector<int>{}, std::vector<int>{2, 1}})
        EXPECT_EQ(combine_over_K(AB, shape(2, c)), combine_over_K(A, combine_over_K(B, shape(2, c))));
    }
}

TEST(Heegner, Examples) {
  // rank (1, 0), both trivial: W(E) = -1 puts the larger corank on E
  auto hp = predict_heegner_profile(synthetic_stats(1, {}), synthetic_stats(0, {}), -1);
  EXPECT_EQ(hp.ord_kappa, 0);
  EXPECT_EQ(hp.normalized_partials, std::vector<int>({0}));
  EXPECT_EQ(hp.root_number_side, 1);
  for (auto& id : hp.identities) EXPECT_TRUE(id.ok) << id.name;
  // E with e_1 = 1 on the larger side: one odd-offset step of 1
  auto hp2 = predict_heegner_profile(synthetic_stats(1, {1}), synthetic_stats(0, {}), -1);
  EXPECT_EQ(hp2.normalized_partials, std::vector<int>({1, 1, 0}));
  EXPECT_EQ(hp2.identities.front().lhs, 2);
  EXPECT_EQ(hp2.identities.front().rhs, 2);
}

TEST(Heegner, Refusals) {
  EXPECT_THROW(predict_heegner_profile(synthetic_stats(2, {}), synthetic_stats(0, {}), 1), HypothesisError);
  EXPECT_THROW(predict_heegner_profile(synthetic_stats(0, {}), synthetic_stats(0, {}), 1), HypothesisError);
  try {
    heegner_profile_from_shapes(shape(1, {}), shape(1, {}), 1);
    FAIL();
  } catch (const HypothesisError& e) {
    EXPECT_NE(std::string(e.what()).find("Err term ambiguous"), std::string::npos);
  }
  EXPECT_THROW(heegner_profile_from_shapes(shape(1, {}), shape(0, {}), 1), HypothesisError);  // wrong sign
}

TEST(Heegner, RoundTripExhaustive) {
  auto parts = partitions_up_to(6);
  int cases = 0;
  for (int ord = 0; ord <= 3; ++ord)
    for (int s : {1, -1})
      for (auto& small : parts)
        for (auto& large : parts) {
          int spread = 2 * (std::accumulate(small.begin(), small.end(), 0) + std::accumulate(large.begin(), large.end(), 0));
          if (spread > 12) continue;
          ModuleShape sm = shape(ord, small), lg = shape(ord + 1, large);
          ModuleShape E = s == 1 ? lg : sm, EK = s == 1 ? sm : lg;
          int W = s * ((ord + 1) % 2 == 0 ? 1 : -1);
          auto hp = heegner_profile_from_shapes(E, EK, W);
          EXPECT_EQ(hp.ord_kappa, ord);
          EXPECT_EQ(hp.root_number_side, s);
          for (auto& id : hp.identities) ASSERT_TRUE(id.ok) << id.name;
          EXPECT_EQ(2 * hp.normalized_partials.front(), E.length() + EK.length());
          for (std::size_t j = 1; j < hp.normalized_partials.size(); ++j)
            EXPECT_LE(hp.normalized_partials[j], hp.normalized_partials[j - 1]);
          auto [rE, rEK] = invert_heegner_profile(hp.ord_kappa, hp.normalized_partials, W);
          EXPECT_EQ(rE, E);
          EXPECT_EQ(rEK, EK);
          ++cases;
        }
  EXPECT_GT(cases, 1000);
}

TEST(Waldspurger, Examples) {
  auto wp = predict_waldspurger_profile(synthetic_stats(0, {}), synthetic_stats(0, {}));
  EXPECT_EQ(wp.ord_lambda, 0);
  EXPECT_TRUE(wp.steps.empty());
  auto wp2 = predict_waldspurger_profile(synthetic_stats(0, {1}), synthetic_stats(0, {2}));
  EXPECT_EQ(wp2.ord_lambda, 0);
  EXPECT_EQ(wp2.steps, std::vector<int>({2, 1}));
  EXPECT_EQ(wp2.identities.front().lhs, 6);
  EXPECT_EQ(wp2.identities.front().rhs, 6);
  EXPECT_THROW(predict_waldspurger_profile(synthetic_stats(1, {}), synthetic_stats(0, {})), HypothesisError);
  auto bad = synthetic_stats(0, {});
  bad.ord_certified = false;
  EXPECT_THROW(predict_waldspurger_profile(bad, synthetic_stats(0, {})), InconclusiveError);
}

TEST(Waldspurger, AgreesWithLambdaProfile) {
  auto parts = partitions_up_to(5);
  for (int cE = 0; cE <= 2; ++cE)
    for (int cK = cE % 2; cK <= 2; cK += 2)
      for (auto& a : parts)
        for (auto& b : parts) {
          auto wp = waldspurger_profile_from_shapes(shape(cE, a), shape(cK, b));
          for (auto& id : wp.identities) ASSERT_TRUE(id.ok);
          auto lp = lambda_profile(wp.merged.exponents, 0, ArtinianContext{5, 1000});
          for (auto& [r, v] : wp.normalized_partials) EXPECT_EQ(lp.at(r), v);
          EXPECT_EQ(lp.rbegin()->second, 0);
        }
}

TEST(Heegner, TamagawaExpectationIsInformational) {
  auto hp = heegner_profile_from_shapes(shape(1, {}), shape(0, {}), -1);
  attach_tamagawa_expectation(hp, 0, {{11, 5}}, 5);
  ASSERT_TRUE(hp.tamagawa_expectation);
  EXPECT_FALSE(hp.tamagawa_expectation->ok);  // reported, never thrown
  EXPECT_EQ(hp.tamagawa_expectation->rhs, 1);
}
