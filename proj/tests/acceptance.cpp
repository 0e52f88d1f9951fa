// Acceptance suite: runs every criterion of the theorem-check suite at the
// reference scale (n=3, horizon 2), prints one pass/fail line per
// criterion, and enforces each criterion's wall-clock budget.

#include <cstdio>
#include <cstring>
#include <map>
#include <string>

#include "heardof/analysis.hpp"
#include "heardof/json_io.hpp"

using namespace heardof;

int main(int argc, char** argv) {
  SuiteConfig cfg;
  cfg.timings = true;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--n") == 0 && i + 1 < argc)
      cfg.n = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--horizon") == 0 && i + 1 < argc)
      cfg.horizon = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--verbose") == 0)
      verbose = true;
  }

  const std::map<std::string, long> budget_s = {
      {"c01-fnf-heardof-characterization", 60},
      {"c02-validity-criteria", 5},
      {"c03-standard-execution", 30},
      {"c04-canonical-execution", 30},
      {"c05-oblivious-composition", 60},
      {"c06-crash-combination-identity", 120},
      {"c07-hoprod-lemma", 120},
      {"c08-conservative-composition-bounds", 180},
      {"c09-property-preservation", 60},
      {"c10-floss", 300},
      {"c11-domination-separations", 120},
      {"c12-determinism", 2 * (60 + 5 + 30 + 30 + 60 + 120 + 120 + 180 + 60 +
                               300 + 120)},
  };

  std::printf("acceptance suite at n=%d, horizon=%d\n", cfg.n, cfg.horizon);
  const std::vector<TheoremReport> reports = run_theorem_suite(cfg);

  int failed = 0;
  for (const TheoremReport& r : reports) {
    const auto it = budget_s.find(r.theorem);
    const long budget = it == budget_s.end() ? 600 : it->second;
    const bool in_budget = r.elapsed_ms < budget * 1000;
    const bool ok = !r.failed() && in_budget;
    std::printf("[%s] %-38s %-16s %6lld ms (budget %ld s)\n",
                ok ? "PASS" : "FAIL", r.theorem.c_str(), r.verdict.c_str(),
                static_cast<long long>(r.elapsed_ms), budget);
    if (!ok) {
      ++failed;
      if (!r.witness.is_null())
        std::printf("       witness: %s\n", r.witness.dump().c_str());
    } else if (verbose && !r.witness.is_null()) {
      std::printf("       %s\n", r.witness.dump().c_str());
    }
  }
  std::printf("%d of %zu criteria failed\n", failed, reports.size());
  return failed == 0 ? 0 : 1;
}
