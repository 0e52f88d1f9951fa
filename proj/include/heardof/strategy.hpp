#pragma once

// Strategies as membership predicates over local states, with exact finite
// payloads for the oblivious family (a set of current-round sender sets)
// and the conservative family (a set of accepted prefixes), the concrete
// strategies f_{n-F} and f_loss, minimal-strategy extraction, the validity
// criteria and the four composition operators.

#include <vector>

#include "heardof/core.hpp"
#include "heardof/predicate.hpp"

namespace heardof {

enum class StrategyKind {
  oblivious,        // depends on current-round senders only
  conservative,     // depends on the round number and rounds <= current
  future_one_loss,  // f_loss: inspects the next round as well
  explicit_set,     // membership by enumerated bounded states
};

// A conservative state: the accepted per-round sender sets up to `round`.
struct ConsState {
  int round = 1;
  std::vector<Mask> prefix;  // prefix[r-1] = senders heard for round r

  friend auto operator<=>(const ConsState&, const ConsState&) = default;
};

// A local state normalized to the bounded message window [1, horizon+1].
struct BoundedState {
  int round = 1;
  std::vector<Mask> by_round;  // size horizon+1, by_round[r-1] = round r

  friend auto operator<=>(const BoundedState&, const BoundedState&) = default;
};

struct Strategy {
  StrategyKind kind = StrategyKind::oblivious;
  int n = 1;
  int horizon = 0;  // set for conservative and explicit_set payloads

  std::vector<Mask> nexts;          // oblivious, sorted
  std::vector<ConsState> nextsC;    // conservative, sorted
  std::vector<BoundedState> states; // explicit_set, sorted

  bool contains(const LocalState& q) const;

  // Engine fast path: by_round[r-1] holds the senders heard for round r;
  // rounds beyond `rounds` are empty.
  bool contains_rounds(int round, const Mask* by_round, int rounds) const;

  // Whether membership can depend on messages from rounds > current.
  bool looks_ahead() const {
    return kind == StrategyKind::future_one_loss ||
           kind == StrategyKind::explicit_set;
  }

  bool empty_payload() const;

  bool operator==(const Strategy&) const = default;
};

Strategy make_oblivious(int n, std::vector<Mask> nexts);
Strategy make_conservative(int n, int horizon, std::vector<ConsState> nextsC);

// Waits for at least n-F current-round messages.
Strategy f_n_minus_f(int n, int faults);

// Accepts on a full current round, or on n-1 current plus n-1 next-round
// messages.
Strategy f_loss(int n);

// Nexts = all delivered sets of the predicate.
Strategy minimal_oblivious(const Predicate& p);

// NextsC = all per-process prefixes of members, every length up to R.
Strategy minimal_conservative(const Predicate& p);

// The conservative strategy accepting exactly the states whose current
// round view is in `nexts`, materialized up to the horizon.
Strategy conservative_lift(const Strategy& oblivious, int horizon);

// Validity criteria: payload containment of the minimal strategy.
bool oblivious_valid_for(const Strategy& f, const Predicate& p);
bool conservative_valid_for(const Strategy& f, const Predicate& p);

// Every bounded state (rounds 1..horizon, messages up to horizon+1) that f
// accepts, as an explicit_set strategy. Exact at this scale.
Strategy materialize_strategy(const Strategy& f, int horizon);

// Composition. Oblivious x oblivious and conservative x conservative have
// closed-form payloads; mixed kinds are materialized at `horizon_hint`
// (required when neither operand carries a horizon).
Strategy strat_union(const Strategy& a, const Strategy& b,
                     int horizon_hint = 0);
Strategy strat_combine(const Strategy& a, const Strategy& b,
                       int horizon_hint = 0);
Strategy strat_succeed(const Strategy& a, const Strategy& b,
                       int horizon_hint = 0);
Strategy strat_repeat(const Strategy& a, int horizon_hint = 0);

}  // namespace heardof
