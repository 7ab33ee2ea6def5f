#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kurihara.hpp"

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(KURIHARA_CLI) + " " + args + " --curves " + KURIHARA_DATA_DIR + "/curves.jsonl > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_plain(const std::string& args) {
  std::string cmd = std::string(KURIHARA_CLI) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("predict --label 11a1 --p 7 --prime-bound 800 --max-nu 1"), 0);
  EXPECT_EQ(run("predict --label 11a1 --p 5"), 2);
  EXPECT_EQ(run("predict --label 11a1 --p 3"), 2);
  EXPECT_EQ(run("predict --label 37a1 --p 5 --max-nu 0"), 3);
  EXPECT_EQ(run("predict --label nope"), 1);
  EXPECT_EQ(run("sieve --label 11a1 --family ac --p 7 --prime-bound 100"), 1);  // ac needs --DK
  EXPECT_EQ(run_plain("bogus"), 1);
  EXPECT_EQ(run_plain("bipartite-sim --shape 2,1 --p 5 --k 3 --steps 200"), 0);
  EXPECT_EQ(run_plain("bipartite-sim --shape 1,2 --k 3"), 1);
  EXPECT_EQ(run_plain("gross-points --DK -7 --q 5 --beta 4 --precision 10"), 0);
  EXPECT_EQ(run_plain("gross-points --DK -7 --q 5 --beta 3"), 2);
  EXPECT_EQ(run_plain("gross-points --DK -7 --q 11 --case p_inert --p 5"), 1);
  EXPECT_EQ(run("waldspurger --label 11a1 --DK -8 --p 7"), 2);  // nu(N^-) even
}

TEST(Cli, SieveJsonLines) {
  auto out = std::filesystem::temp_directory_path() / ("kurihara_cli_sieve_" + std::to_string(::getpid()) + ".jsonl");
  ASSERT_EQ(run("sieve --label 11a1 --p 7 --prime-bound 500 --out " + out.string()), 0);
  std::ifstream in(out);
  std::string line;
  std::vector<std::uint64_t> qs;
  while (std::getline(in, line)) {
    auto j = kurihara::Json::parse(line);
    EXPECT_EQ(j["family"], "cyc");
    EXPECT_TRUE(j.contains("v1") && j.contains("v2") && j.contains("epsilon"));
    qs.push_back(j["q"].get<std::uint64_t>());
  }
  EXPECT_FALSE(qs.empty());
  EXPECT_TRUE(std::is_sorted(qs.begin(), qs.end()));
  std::filesystem::remove(out);
}
