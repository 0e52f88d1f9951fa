#pragma once

// Delivered predicates: finite, deduplicated sets of horizon-bounded
// collections, the elementary builders, the four composition operators,
// and the structural property checkers (round/prefix symmetry,
// common round, common prefix).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heardof/core.hpp"

namespace heardof {

// Thrown when an enumeration would materialize more candidates than the cap.
struct cap_error : std::runtime_error {
  std::uint64_t estimate;
  explicit cap_error(const std::string& what, std::uint64_t estimate_)
      : std::runtime_error(what), estimate(estimate_) {}
};

// Default candidate-space cap; HEARDOF_CAP overrides it at process start.
std::uint64_t enumeration_cap();
void set_enumeration_cap(std::uint64_t cap);

struct Predicate {
  int n = 1;
  int horizon = 1;
  std::vector<Collection> collections;  // sorted, duplicate-free, nonempty
  std::string expr;                     // provenance; ignored by equality

  bool contains(const Collection& c) const;
  bool has_total() const { return contains(total_collection(n, horizon)); }

  bool operator==(const Predicate& other) const {
    return n == other.n && horizon == other.horizon &&
           collections == other.collections;
  }
};

// Sorts, deduplicates and validates; rejects the empty predicate.
Predicate make_predicate(int n, int horizon, std::vector<Collection> members,
                         std::string expr);

Predicate build_total(int n, int horizon);

// All collections with some crash set S of cardinality >= n-1:
// rounds < r all-Pi, round-r entries independent supersets of S,
// rounds > r exactly S.
Predicate build_crash1_at(int n, int horizon, int round);

// Brute-force filter of the per-round cardinality clause, the kernel
// clause for rounds < R, and kernel cardinality at R (which is what makes
// the horizon table extendable to further rounds).
Predicate build_crashf(int n, int horizon, int faults);
Predicate build_crashf_serial(int n, int horizon, int faults);  // reference

// All collections whose total missing-message count is <= losses.
Predicate build_lossl(int n, int horizon, int losses);

Predicate union_pred(const Predicate& a, const Predicate& b);
Predicate combine_pred(const Predicate& a, const Predicate& b);
Predicate succeed_pred(const Predicate& a, const Predicate& b);
Predicate repeat_pred(const Predicate& a);

// Every delivered set occurs at every (round, process) slot.
bool is_round_symmetric(const Predicate& p);

// Every per-process prefix is realized by every other process somewhere.
bool is_prefix_symmetric(const Predicate& p);

// c_total present, and every delivered set D can be staged at any target
// round r' behind an all-Pi prefix, simultaneously for all processes.
bool has_common_round(const Predicate& p);

// Every per-process prefix is realized simultaneously by all processes
// in some member.
bool has_common_prefix(const Predicate& p);

// The delivered sets {c(r,p)} over all members, rounds and processes.
std::vector<Mask> delivered_sets(const Predicate& p);

// Per-process prefix of a member: rows c(1,p)..c(len,p).
std::vector<std::vector<Mask>> member_prefixes(const Predicate& p, int len);

}  // namespace heardof
