#include <gtest/gtest.h>

#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "compcx/cli.hpp"

using namespace compcx;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  set_worker_count(0);
  return r;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(COMPCX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, EveryOperationIsReachable) {
  std::set<std::string> ops;
  for (const auto& entry : cli::command_table()) {
    EXPECT_TRUE(ops.insert(entry.operation).second) << entry.operation;
    const auto r = run(entry.example);
    EXPECT_EQ(r.code, cli::kExitOk) << entry.operation << ": " << r.err;
    EXPECT_FALSE(r.out.empty()) << entry.operation;
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"revenue", "--mech", "auction"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"virtual", "--dist", "uniform:0,1", "--quantile", "2"}).code, cli::kExitPrecondition);
  EXPECT_EQ(run({"virtual", "--dist", "gamma:2", "--at", "1"}).code, cli::kExitPrecondition);
  // two runs cannot match the identity within three standard errors
  EXPECT_EQ(run({"reproduce", "--claim", "three_tier_identity", "--samples", "2"}).code, cli::kExitClaimFailed);
}

TEST(Cli, BinaryExitCodes) {
  EXPECT_EQ(run_binary("virtual --dist uniform:0,1 --at 0.75"), 0);
  EXPECT_EQ(run_binary("revenue --mech nope"), 2);
  EXPECT_EQ(run_binary("virtual --dist uniform:0,1 --quantile 2"), 3);
}

TEST(Cli, VirtualValueOutput) {
  const auto r = run({"virtual", "--dist", "uniform:0,1", "--at", "0.75"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.5"), std::string::npos) << r.out;
}

TEST(Cli, DeterministicAcrossRunsAndWorkers) {
  const std::vector<std::string> base = {"reproduce", "--claim", "two_item_sum_tail", "--claim",
                                         "er_order_statistics", "--samples", "30000", "--seed", "5"};
  auto with_workers = [&](const std::string& w) {
    auto args = base;
    args.insert(args.end(), {"--workers", w});
    return run(args);
  };
  const auto a = with_workers("1");
  const auto b = with_workers("1");
  const auto c = with_workers("3");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  const auto other_seed = run({"reproduce", "--claim", "two_item_sum_tail", "--samples", "30000", "--seed", "6"});
  EXPECT_NE(other_seed.out, a.out);
}

TEST(Cli, JsonCarriesConfig) {
  const auto r = run({"revenue", "--mech", "vcg", "--dist", "uniform:0,1", "-n", "2", "--samples", "5000",
                      "--seed", "9", "--out", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = cli::Json::parse(r.out);
  EXPECT_EQ(doc["config"]["seed"], 9);
  EXPECT_EQ(doc["config"]["samples"], 5000);
  EXPECT_EQ(doc["config"]["command"], "revenue");
}

TEST(Cli, TimingColumnOnlyWhenAsked) {
  const std::vector<std::string> args = {"reproduce", "--claim", "two_item_sum_tail", "--samples", "20000"};
  const auto plain = run(args);
  auto timed_args = args;
  timed_args.push_back("--timing");
  const auto timed = run(timed_args);
  EXPECT_EQ(plain.out.find("runtime"), std::string::npos);
  EXPECT_NE(timed.out.find("runtime"), std::string::npos);
}

TEST(Cli, ListsClaims) {
  const auto r = run({"reproduce", "--list"});
  ASSERT_EQ(r.code, 0);
  for (const auto& c : claim_registry()) EXPECT_NE(r.out.find(c.id), std::string::npos) << c.id;
}
