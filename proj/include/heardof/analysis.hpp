#pragma once

// Heard-of predicate computation (HOProd, generation, upper bounds),
// bounded domination checking within the two closed families, and the
// theorem-check suite that the acceptance criteria run.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "heardof/execution.hpp"
#include "heardof/expr.hpp"
#include "heardof/predicate.hpp"
#include "heardof/strategy.hpp"

namespace heardof {

enum class HOGenerator { hoprod, enumerated, literal };

struct HeardOfPredicate {
  int n = 1;
  int horizon = 1;
  std::vector<Collection> collections;  // sorted, duplicate-free
  HOGenerator tag = HOGenerator::literal;
  std::vector<Mask> basis;  // hoprod: the generating family
  bool exact = true;        // enumerated: whether exploration completed

  bool operator==(const HeardOfPredicate& other) const {
    return n == other.n && horizon == other.horizon &&
           collections == other.collections;
  }
};

// All |S|^(n*R) collections whose every heard-of set lies in `basis`.
HeardOfPredicate ho_product(std::vector<Mask> basis, int n, int horizon);
HeardOfPredicate ho_product_serial(std::vector<Mask> basis, int n,
                                   int horizon);  // reference twin

// Membership without materializing the product.
bool in_ho_product(const Collection& ho, const std::vector<Mask>& basis);

// HOProd(Nexts_f), after checking that the predicate contains the total
// collection and that f is valid for it.
HeardOfPredicate generate_ho_oblivious(const Strategy& f, const Predicate& p);

// The heard-of predicate of f on p by bounded exhaustive enumeration.
HeardOfPredicate generate_ho_enumerated(const Strategy& f, const Predicate& p,
                                        std::uint64_t budget = kDefaultBudget);

enum class PredOp { union_op, combine_op, succeed_op, repeat_op };

// The HOProd upper bound on the heard-of predicate of composed minimal
// conservative strategies; the basis is built from the operands' minimal
// oblivious payloads. For repetition only the first operand is read.
std::vector<Mask> conservative_upper_bound_basis(PredOp op,
                                                 const Predicate& p1,
                                                 const Predicate& p2);
HeardOfPredicate conservative_ho_upper_bound(const Strategy& f1_cons,
                                             const Strategy& f2_cons,
                                             PredOp op, const Predicate& p1,
                                             const Predicate& p2);

struct TheoremReport {
  std::string theorem;
  nlohmann::json params = nlohmann::json::object();
  std::string verdict;  // holds-at-horizon | fails | partial-budget
  nlohmann::json witness;
  std::int64_t elapsed_ms = 0;

  bool holds() const { return verdict == "holds-at-horizon"; }
  bool failed() const { return verdict == "fails"; }
};

struct SuiteConfig {
  int n = 3;
  int horizon = 2;
  std::uint64_t budget = kDefaultBudget;
  unsigned seed = 12345;
  EventOrder order = EventOrder::lexicographic;
  bool timings = false;        // when false, elapsed_ms is reported as 0
  int domination_samples = 12; // sample size above the exhaustive cap
  int sample_count = 200;      // randomized standard-execution checks
};

// Whether HO(f_min) is contained in HO(f) for every enumerable valid
// strategy of the family; sampled (and flagged partial) above the cap.
TheoremReport check_family_domination(const Predicate& p, StrategyKind family,
                                      const SuiteConfig& cfg);

// Sufficient-condition certificates: common round implies domination by
// the minimal oblivious strategy, common prefix by the minimal
// conservative one; otherwise no condition applies and an f_loss
// comparison is attached when f_loss is valid for p.
TheoremReport check_global_domination_evidence(const Predicate& p,
                                               const SuiteConfig& cfg);

// Runs every acceptance criterion and returns one report per criterion,
// sorted by theorem id. Individual failures are reports, not aborts.
std::vector<TheoremReport> run_theorem_suite(const SuiteConfig& cfg);

bool suite_passed(const std::vector<TheoremReport>& reports);

}  // namespace heardof
