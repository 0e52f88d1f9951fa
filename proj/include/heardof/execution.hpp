#pragma once

// Finite execution traces over deliver/next/stop events: validation,
// the standard, canonical and shifted-canonical constructions, heard-of
// extraction, the bounded exhaustive scheduler enumeration and the
// deadlock (validity) search.

#include <cstdint>
#include <string>
#include <vector>

#include "heardof/core.hpp"
#include "heardof/predicate.hpp"
#include "heardof/strategy.hpp"

namespace heardof {

struct Event {
  enum class Type : std::uint8_t { deliver, next, stop };
  Type type = Type::stop;
  int round = 0;    // deliver only
  int sender = 0;   // deliver only
  int process = 0;  // deliver: receiver; next: the advancing process

  static Event make_deliver(int round, int sender, int receiver) {
    return Event{Type::deliver, round, sender, receiver};
  }
  static Event make_next(int process) {
    return Event{Type::next, 0, 0, process};
  }
  static Event make_stop() { return Event{}; }

  friend auto operator<=>(const Event&, const Event&) = default;
};

struct Execution {
  int n = 1;
  int horizon = 1;
  std::vector<Event> events;
};

struct CheckResult {
  bool ok = true;
  std::size_t index = 0;   // first offending event when !ok
  std::string reason;

  explicit operator bool() const { return ok; }
};

// The three well-formedness clauses: delivery after sending, unique
// delivery, once stopped forever stopped.
CheckResult validate_execution(const Execution& t);

// Round counter and received messages of `process` after the first `upto`
// events.
LocalState local_state(const Execution& t, int process, std::size_t upto);

// Horizon-bounded biconditional: every message mandated by c whose sender
// reached its sending round is delivered, and every delivery of rounds
// <= horizon is mandated. Deliveries tagged horizon+1 are unconstrained.
bool is_execution_of_collection(const Execution& t, const Collection& c);

// Every next is taken from a state in f, and bounded fairness holds: a
// process whose final state is in f must have completed all R rounds.
CheckResult check_execution_of_strategy(const Execution& t,
                                        const Strategy& f);
bool is_execution_of_strategy(const Execution& t, const Strategy& f);

// Phased deliver-then-advance construction of f on c, truncated at the
// horizon; ends with a single stop when no unfinished process can move.
Execution standard_execution(const Strategy& f, const Collection& c,
                             EventOrder order = EventOrder::lexicographic);

// Per round: on-time deliveries plus the previous round's leftovers, then
// one next per process; the round-R leftovers are appended at the end.
Execution canonical_execution(const Collection& ho,
                              EventOrder order = EventOrder::lexicographic);

// Canonical execution with each deficient process's next postponed past
// the next-round deliveries addressed to it. Requires per-round total
// deficiency at most one.
Execution shifted_canonical_execution(
    const Collection& ho, EventOrder order = EventOrder::lexicographic);

// ho(r,p) = senders of round-r messages received by p before its r-th
// next. Requires every process to complete all horizon rounds.
Collection extract_heardof(const Execution& t);

struct HOEnumResult {
  std::vector<Collection> collections;  // sorted, duplicate-free
  bool exact = true;                    // false when the budget ran out
  std::uint64_t work = 0;
};

constexpr std::uint64_t kDefaultBudget = 500'000'000ull;

// Exhaustive enumeration of the heard-of collections generated by f over
// the members of del, within the horizon. Interleavings are explored up
// to commutation of deliveries; when f never inspects future rounds the
// exploration is further narrowed to the windows that can matter.
HOEnumResult enumerate_ho_bounded(const Strategy& f, const Predicate& del,
                                  std::uint64_t budget = kDefaultBudget);

// Single-event-step reference enumerator. Exponentially slower; kept as
// the serial oracle for the engine above.
HOEnumResult naive_enumerate_ho(const Strategy& f, const Predicate& del,
                                std::uint64_t budget = kDefaultBudget);

struct DeadlockWitness {
  bool found = false;
  bool exhausted = true;   // false when the budget ran out first
  std::size_t collection_index = 0;
  int blocked_process = 0;
  std::string description;
};

// Bounded validity search: looks for a reachable scheduler state in which
// some process can never advance again. No witness on a completed search
// means f is valid for del at this horizon.
DeadlockWitness find_deadlock(const Strategy& f, const Predicate& del,
                              std::uint64_t budget = kDefaultBudget);

}  // namespace heardof
