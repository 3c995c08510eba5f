// One line per acceptance criterion; exit status is nonzero if any fails.

#include <array>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "compcx/reproductions.hpp"

using namespace compcx;

namespace {

constexpr std::uint64_t kSeed = 42;

const std::map<int, std::string> kDescriptions = {
    {1, "conditional mean of phi equals the threshold (uniform, ER)"},
    {2, "VCG with one extra bidder beats the optimal revenue"},
    {3, "optimal single-item revenue of ER(1e4) is n"},
    {4, "ER order statistic means y/(x-1)"},
    {5, "big-n dominance at the 4n/(l-1) threshold, and its failure at c = 1"},
    {6, "little-n and single-bidder dominance"},
    {7, "closed-form conditional tail of Y* against Monte Carlo"},
    {8, "little-n and big-n chains of upper bounds"},
    {9, "ER benchmark tightness: off-region mass and VCG with extra bidders"},
    {10, "three-tier revenue identity and the two-item tail"},
    {11, "reproduce --all is byte-identical across two runs"},
};

bool capture(const std::string& cmd, std::string& out) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return false;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
  return pclose(pipe.release()) != -1;
}

void report(int criterion, bool pass, const std::string& note = {}) {
  std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL") << "  " << kDescriptions.at(criterion);
  if (!note.empty()) std::cout << " (" << note << ")";
  std::cout << std::endl;
}

}  // namespace

int main() {
  bool ok = true;
  for (int k = 1; k <= 10; ++k) {
    bool pass = true;
    std::size_t rows = 0;
    std::string failed;
    for (const auto& claim : claim_registry()) {
      if (claim.criterion != k) continue;
      for (const auto& r : run_claim(claim, kSeed)) {
        ++rows;
        if (!r.pass) {
          pass = false;
          failed += (failed.empty() ? "" : " ") + claim.id + "/" + r.name;
        }
      }
    }
    pass = pass && rows > 0;
    report(k, pass, pass ? std::to_string(rows) + " rows" : "failed: " + failed);
    ok = ok && pass;
  }

  const std::string cmd = std::string(COMPCX_CLI_PATH) + " reproduce --all --seed 42";
  std::string first, second;
  const bool ran = capture(cmd, first) && capture(cmd, second);
  const bool same = ran && !first.empty() && first == second;
  report(11, same, std::to_string(first.size()) + " bytes");
  ok = ok && same;

  return ok ? 0 : 1;
}
