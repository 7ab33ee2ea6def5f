#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace ktest;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.p = 7;
  cfg.prime_bound = 1500;
  cfg.max_nu = 2;
  cfg.max_n = 1000000;
  return cfg;
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("kurihara_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(Ingest, EmptyFile) {
  std::istringstream in("");
  EXPECT_TRUE(ingest_stream(in).records.empty());
  std::istringstream blank("\n  \n");
  EXPECT_TRUE(ingest_stream(blank).records.empty());
}

TEST(Ingest, DuplicateLabel) {
  std::string line = record_to_json(record("11a1")).dump();
  std::istringstream strict_in(line + "\n" + line + "\n");
  EXPECT_THROW(ingest_stream(strict_in, true), InputError);
  std::istringstream lenient_in(line + "\n" + line + "\n");
  auto res = ingest_stream(lenient_in, false);
  EXPECT_EQ(res.records.size(), 2u);
  EXPECT_EQ(res.warnings.size(), 1u);
}

TEST(Ingest, LineNumberedErrors) {
  std::string good = record_to_json(record("11a1")).dump();
  std::istringstream in(good + "\n{not json\n");
  try {
    ingest_stream(in);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 2", 0), 0u) << e.what();
  }
  auto j = record_to_json(record("37a1"));
  j["colour"] = "blue";
  std::istringstream unknown(j.dump());
  EXPECT_THROW(ingest_stream(unknown, true), InputError);
  std::istringstream unknown2(j.dump());
  auto res = ingest_stream(unknown2, false);
  EXPECT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.warnings.size(), 1u);
  auto bad = record_to_json(record("37a1"));
  bad["root_number"] = 0;
  std::istringstream in3(bad.dump());
  EXPECT_THROW(ingest_stream(in3), InputError);
}

TEST(Ingest, RoundTripHundredRecords) {
  std::mt19937_64 rng(100);
  std::vector<CurveRecord> recs;
  std::string text;
  for (int i = 0; i < 100; ++i) {
    CurveRecord r;
    r.label = "synthetic" + std::to_string(i);
    for (auto& a : r.ainvs) {
      a = Integer(static_cast<long>(rng() % 2000001)) - 1000000;
      if (i % 10 == 0) a *= Integer("123456789012345678901234567890");
    }
    r.conductor = 1 + rng() % 100000;
    r.root_number = rng() % 2 ? 1 : -1;
    if (i % 3) r.known_rank = static_cast<int>(rng() % 4);
    if (i % 4) r.known_sha_order = 1 + rng() % 50;
    if (i % 2) r.flags[5] = CurveFlags{rng() % 2 == 0, true, rng() % 2 == 0};
    r.flags[7] = CurveFlags{true, rng() % 2 == 0, false};
    if (i % 5) r.tamagawa[2 + rng() % 50] = 1 + rng() % 5;
    text += record_to_json(r).dump() + "\n";
    recs.push_back(std::move(r));
  }
  std::istringstream in(text);
  auto back = ingest_stream(in);
  ASSERT_EQ(back.records.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_TRUE(back.records[i] == recs[i]) << i;
}

TEST(Ingest, ShippedCurveFile) {
  auto& recs = records();
  EXPECT_EQ(recs.size(), 10u);
  for (auto& r : recs) EXPECT_NO_THROW(make_curve(r)) << r.label;
}

TEST(Pipeline, Hypotheses) {
  RunConfig cfg = small_config();
  cfg.p = 3;
  EXPECT_THROW(cfg.validate(), HypothesisError);
  cfg.allow_small_p = true;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_TRUE(cfg.tainted());
  cfg = small_config();
  cfg.p = 5;
  EXPECT_THROW(run_pipeline(record("11a1"), cfg), HypothesisError);  // flags say not surjective
  cfg.p = 11;
  EXPECT_THROW(run_pipeline(record("11a1"), cfg), HypothesisError);  // p | N
  cfg.p = 17;
  EXPECT_THROW(run_pipeline(record("11a1"), cfg), HypothesisError);  // no flags for p
}

TEST(Pipeline, DeterministicReports) {
  auto cfg = small_config();
  auto a = run_pipeline(record("11a1"), cfg);
  cfg.threads = 3;
  auto b = run_pipeline(record("11a1"), cfg);
  cfg.threads = 0;
  auto c = run_pipeline(record("11a1"), cfg);
  EXPECT_EQ(a.report.dump(), c.report.dump());
  // thread count is not part of the report
  EXPECT_EQ(a.report.dump(), b.report.dump());
  EXPECT_EQ(a.report["code_hash"], kCodeHash);
  ASSERT_TRUE(a.prediction);
  EXPECT_EQ(a.prediction->shape.corank, 0);
}

TEST(Pipeline, WarmCacheEqualsCold) {
  auto dir = fresh_dir("cache");
  auto cfg = small_config();
  auto cold = run_pipeline(record("11a1"), cfg);
  cfg.cache_dir = dir.string();
  auto E = curve("11a1");
  auto first = load_or_build_symbol(E, 1, cfg.cache_dir);
  EXPECT_FALSE(first.from_cache);
  auto second = load_or_build_symbol(E, 1, cfg.cache_dir);
  EXPECT_TRUE(second.from_cache);
  EXPECT_EQ(first.symbol.values, second.symbol.values);
  auto warm = run_pipeline(record("11a1"), cfg);
  EXPECT_EQ(cold.report.dump(), warm.report.dump());
  std::filesystem::remove_all(dir);
}

TEST(Pipeline, StagesAndInconclusive) {
  auto cfg = small_config();
  auto s = run_pipeline(record("11a1"), cfg, Stage::sieve);
  EXPECT_TRUE(s.report.contains("sieve"));
  EXPECT_FALSE(s.report.contains("records"));
  cfg.p = 5;
  cfg.max_nu = 0;
  auto r = run_pipeline(record("37a1"), cfg);
  EXPECT_TRUE(r.inconclusive);
  EXPECT_EQ(r.report["prediction"]["status"], "inconclusive");
}

TEST(GzPair, BranchAndComponents) {
  auto cfg = small_config();
  cfg.max_n = 200000;
  auto g = gz_pair(record("11a1"), -8, cfg);
  EXPECT_EQ(g.split.nu_minus, split_conductor(11, -8, 7).nu_minus);
  EXPECT_EQ(g.report["branch"], "gross_zagier");
  ASSERT_TRUE(g.heegner);
  for (auto& id : g.heegner->identities) EXPECT_TRUE(id.ok) << id.name;
  auto solo = run_pipeline(record("11a1"), cfg);
  EXPECT_EQ(g.E.prediction->shape, solo.prediction->shape);
  EXPECT_EQ(g.E.report.dump(), solo.report.dump());
  auto tw = run_pipeline(twist_record(record("11a1"), -8), cfg);
  EXPECT_EQ(g.EK.prediction->shape, tw.prediction->shape);

  auto w = gz_pair(record("11a1"), -3, cfg);
  EXPECT_EQ(w.report["branch"], "waldspurger");
  EXPECT_EQ(w.split.nu_minus % 2, 1);
  ASSERT_TRUE(w.waldspurger);
  for (auto& id : w.waldspurger->identities) EXPECT_TRUE(id.ok) << id.name;
}

TEST(GzPair, MirrorSwapsSides) {
  auto cfg = small_config();
  cfg.max_n = 200000;
  auto g = gz_pair(record("11a1"), -8, cfg);
  auto m = gz_pair(record("11a1"), -8, cfg, true);
  ASSERT_TRUE(g.heegner && m.heegner);
  EXPECT_EQ(m.heegner->root_number_side, -g.heegner->root_number_side);
  EXPECT_EQ(m.heegner->ord_kappa, g.heegner->ord_kappa);
  EXPECT_EQ(m.heegner->normalized_partials, g.heegner->normalized_partials);
  EXPECT_EQ(m.report["E"].dump(), g.report["EK"].dump());
  EXPECT_EQ(m.report["EK"].dump(), g.report["E"].dump());
}

TEST(GzPair, TwistRecord) {
  auto t = twist_record(record("11a1"), -8);
  EXPECT_EQ(t.conductor, 11u * 64u);
  EXPECT_EQ(t.root_number, -1);
  EXPECT_EQ(t.flags.size(), record("11a1").flags.size());
  EXPECT_FALSE(t.known_rank);
}
