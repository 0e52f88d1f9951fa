#include "heardof/strategy.hpp"

#include <algorithm>
#include <iostream>

namespace heardof {

namespace {

void sort_dedup(std::vector<Mask>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

template <typename T>
void sort_dedup(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void warn_if_empty(bool empty, const char* what) {
  // The empty strategy is constructible but can never be valid.
  if (empty)
    std::cerr << "heardof: warning: constructing an empty " << what
              << " strategy; it fails every validity check\n";
}

int require_same_n(const Strategy& a, const Strategy& b) {
  if (a.n != b.n)
    throw std::invalid_argument("strategy operation: universe mismatch");
  return a.n;
}

int mixed_horizon(const Strategy& a, const Strategy& b, int hint) {
  int h = std::max({hint, a.horizon, b.horizon});
  if (h <= 0)
    throw std::invalid_argument(
        "mixed-family strategy operation needs a horizon");
  return h;
}

}  // namespace

bool Strategy::contains(const LocalState& q) const {
  int top = q.round + 1;
  for (const Message& m : q.mes) top = std::max(top, m.round);
  std::vector<Mask> by_round(top, 0);
  for (const Message& m : q.mes)
    by_round[m.round - 1] |= Mask(1) << m.sender;
  return contains_rounds(q.round, by_round.data(), top);
}

bool Strategy::contains_rounds(int round, const Mask* by_round,
                               int rounds) const {
  auto at = [&](int r) -> Mask { return r <= rounds ? by_round[r - 1] : 0; };
  switch (kind) {
    case StrategyKind::oblivious:
      return std::binary_search(nexts.begin(), nexts.end(), at(round));
    case StrategyKind::conservative: {
      if (horizon > 0 && round > horizon) return false;
      ConsState s;
      s.round = round;
      s.prefix.resize(round);
      for (int r = 1; r <= round; ++r) s.prefix[r - 1] = at(r);
      return std::binary_search(nextsC.begin(), nextsC.end(), s);
    }
    case StrategyKind::future_one_loss: {
      const int cur = mask_card(at(round));
      if (cur == n) return true;
      return cur == n - 1 && mask_card(at(round + 1)) == n - 1;
    }
    case StrategyKind::explicit_set: {
      if (round > horizon) return false;
      for (int r = horizon + 2; r <= rounds; ++r)
        if (at(r) != 0) return false;  // outside the bounded window
      BoundedState s;
      s.round = round;
      s.by_round.resize(horizon + 1);
      for (int r = 1; r <= horizon + 1; ++r) s.by_round[r - 1] = at(r);
      return std::binary_search(states.begin(), states.end(), s);
    }
  }
  return false;
}

bool Strategy::empty_payload() const {
  switch (kind) {
    case StrategyKind::oblivious: return nexts.empty();
    case StrategyKind::conservative: return nextsC.empty();
    case StrategyKind::future_one_loss: return false;
    case StrategyKind::explicit_set: return states.empty();
  }
  return true;
}

Strategy make_oblivious(int n, std::vector<Mask> nexts) {
  check_universe(n);
  for (Mask m : nexts)
    if (!mask_subset(m, full_mask(n)))
      throw std::invalid_argument("nexts member outside the universe");
  sort_dedup(nexts);
  warn_if_empty(nexts.empty(), "oblivious");
  Strategy f;
  f.kind = StrategyKind::oblivious;
  f.n = n;
  f.nexts = std::move(nexts);
  return f;
}

Strategy make_conservative(int n, int horizon,
                           std::vector<ConsState> nextsC) {
  check_universe(n);
  check_horizon(horizon);
  for (const ConsState& s : nextsC) {
    if (s.round < 1 || s.round > horizon)
      throw std::invalid_argument("conservative state round outside horizon");
    if (static_cast<int>(s.prefix.size()) != s.round)
      throw std::invalid_argument("conservative prefix length != round");
    for (Mask m : s.prefix)
      if (!mask_subset(m, full_mask(n)))
        throw std::invalid_argument("prefix set outside the universe");
  }
  sort_dedup(nextsC);
  warn_if_empty(nextsC.empty(), "conservative");
  Strategy f;
  f.kind = StrategyKind::conservative;
  f.n = n;
  f.horizon = horizon;
  f.nextsC = std::move(nextsC);
  return f;
}

Strategy f_n_minus_f(int n, int faults) {
  check_universe(n);
  if (faults < 0 || faults > n)
    throw std::invalid_argument("f_{n-F}: F must be in [0,n]");
  std::vector<Mask> nexts;
  for (Mask m = 0; m <= full_mask(n); ++m)
    if (mask_card(m) >= n - faults) nexts.push_back(m);
  return make_oblivious(n, std::move(nexts));
}

Strategy f_loss(int n) {
  check_universe(n);
  if (n < 2) throw std::invalid_argument("f_loss needs n >= 2");
  Strategy f;
  f.kind = StrategyKind::future_one_loss;
  f.n = n;
  return f;
}

Strategy minimal_oblivious(const Predicate& p) {
  return make_oblivious(p.n, delivered_sets(p));
}

Strategy minimal_conservative(const Predicate& p) {
  std::vector<ConsState> states;
  for (int len = 1; len <= p.horizon; ++len)
    for (auto& prefix : member_prefixes(p, len))
      states.push_back(ConsState{len, prefix});
  return make_conservative(p.n, p.horizon, std::move(states));
}

Strategy conservative_lift(const Strategy& oblivious, int horizon) {
  if (oblivious.kind != StrategyKind::oblivious)
    throw std::invalid_argument("conservative_lift expects an oblivious "
                                "strategy");
  check_horizon(horizon);
  const int n = oblivious.n;
  const std::uint64_t per_round = 1ull << n;
  std::vector<ConsState> states;
  for (int round = 1; round <= horizon; ++round) {
    // Earlier rounds are unconstrained, the current one must be accepted.
    std::uint64_t combos = 1;
    for (int i = 1; i < round; ++i) combos *= per_round;
    if (combos * oblivious.nexts.size() > enumeration_cap())
      throw cap_error("conservative_lift: state space exceeds cap",
                      combos * oblivious.nexts.size());
    for (std::uint64_t pick = 0; pick < combos; ++pick) {
      std::vector<Mask> past(round - 1);
      std::uint64_t rest = pick;
      for (int i = 0; i < round - 1; ++i) {
        past[i] = static_cast<Mask>(rest % per_round);
        rest /= per_round;
      }
      for (Mask last : oblivious.nexts) {
        ConsState s;
        s.round = round;
        s.prefix = past;
        s.prefix.push_back(last);
        states.push_back(std::move(s));
      }
    }
  }
  return make_conservative(n, horizon, std::move(states));
}

bool oblivious_valid_for(const Strategy& f, const Predicate& p) {
  if (f.kind != StrategyKind::oblivious)
    throw std::invalid_argument("oblivious_valid_for expects an oblivious "
                                "strategy");
  if (f.n != p.n)
    throw std::invalid_argument("oblivious_valid_for: universe mismatch");
  for (Mask m : delivered_sets(p))
    if (!std::binary_search(f.nexts.begin(), f.nexts.end(), m)) return false;
  return true;
}

bool conservative_valid_for(const Strategy& f, const Predicate& p) {
  if (f.kind != StrategyKind::conservative)
    throw std::invalid_argument("conservative_valid_for expects a "
                                "conservative strategy");
  if (f.n != p.n)
    throw std::invalid_argument("conservative_valid_for: universe mismatch");
  if (f.horizon < p.horizon)
    throw std::invalid_argument("conservative_valid_for: strategy horizon "
                                "shorter than predicate horizon");
  const Strategy min = minimal_conservative(p);
  for (const ConsState& s : min.nextsC)
    if (!std::binary_search(f.nextsC.begin(), f.nextsC.end(), s))
      return false;
  return true;
}

Strategy materialize_strategy(const Strategy& f, int horizon) {
  check_horizon(horizon);
  const int n = f.n;
  const std::uint64_t per_round = 1ull << n;
  std::uint64_t combos = 1;
  for (int r = 0; r <= horizon; ++r) combos *= per_round;
  if (combos * horizon > enumeration_cap())
    throw cap_error("materialize_strategy: state space exceeds cap",
                    combos * horizon);
  std::vector<BoundedState> states;
  std::vector<Mask> by_round(horizon + 1, 0);
  for (int round = 1; round <= horizon; ++round)
    for (std::uint64_t pick = 0; pick < combos; ++pick) {
      std::uint64_t rest = pick;
      for (int r = 0; r <= horizon; ++r) {
        by_round[r] = static_cast<Mask>(rest % per_round);
        rest /= per_round;
      }
      if (f.contains_rounds(round, by_round.data(), horizon + 1))
        states.push_back(BoundedState{round, by_round});
    }
  std::sort(states.begin(), states.end());
  Strategy out;
  out.kind = StrategyKind::explicit_set;
  out.n = n;
  out.horizon = horizon;
  out.states = std::move(states);
  return out;
}

namespace {

// Concatenation of bounded states; empty when the result would need
// messages outside the bounded window.
bool concat_states(const BoundedState& a, const BoundedState& b, int horizon,
                   BoundedState& out) {
  if (a.round + b.round > horizon) return false;
  for (int r = horizon + 1 - a.round + 1; r <= horizon + 1; ++r)
    if (b.by_round[r - 1] != 0) return false;
  out.round = a.round + b.round;
  out.by_round.assign(horizon + 1, 0);
  for (int r = 1; r <= a.round; ++r) out.by_round[r - 1] = a.by_round[r - 1];
  for (int r = a.round + 1; r <= horizon + 1; ++r)
    out.by_round[r - 1] = b.by_round[r - a.round - 1];
  return true;
}

ConsState concat_cons(const ConsState& a, const ConsState& b) {
  ConsState out;
  out.round = a.round + b.round;
  out.prefix = a.prefix;
  out.prefix.insert(out.prefix.end(), b.prefix.begin(), b.prefix.end());
  return out;
}

Strategy explicit_result(int n, int horizon, std::vector<BoundedState> states) {
  sort_dedup(states);
  Strategy out;
  out.kind = StrategyKind::explicit_set;
  out.n = n;
  out.horizon = horizon;
  out.states = std::move(states);
  return out;
}

}  // namespace

Strategy strat_union(const Strategy& a, const Strategy& b, int horizon_hint) {
  const int n = require_same_n(a, b);
  if (a.kind == StrategyKind::oblivious && b.kind == StrategyKind::oblivious) {
    std::vector<Mask> nexts = a.nexts;
    nexts.insert(nexts.end(), b.nexts.begin(), b.nexts.end());
    return make_oblivious(n, std::move(nexts));
  }
  if (a.kind == StrategyKind::conservative &&
      b.kind == StrategyKind::conservative && a.horizon == b.horizon) {
    std::vector<ConsState> states = a.nextsC;
    states.insert(states.end(), b.nextsC.begin(), b.nextsC.end());
    return make_conservative(n, a.horizon, std::move(states));
  }
  const int h = mixed_horizon(a, b, horizon_hint);
  Strategy ma = materialize_strategy(a, h), mb = materialize_strategy(b, h);
  std::vector<BoundedState> states = std::move(ma.states);
  states.insert(states.end(), mb.states.begin(), mb.states.end());
  return explicit_result(n, h, std::move(states));
}

Strategy strat_combine(const Strategy& a, const Strategy& b,
                       int horizon_hint) {
  const int n = require_same_n(a, b);
  if (a.kind == StrategyKind::oblivious && b.kind == StrategyKind::oblivious) {
    std::vector<Mask> nexts;
    for (Mask x : a.nexts)
      for (Mask y : b.nexts) nexts.push_back(x & y);
    return make_oblivious(n, std::move(nexts));
  }
  if (a.kind == StrategyKind::conservative &&
      b.kind == StrategyKind::conservative && a.horizon == b.horizon) {
    std::vector<ConsState> states;
    for (const ConsState& x : a.nextsC)
      for (const ConsState& y : b.nextsC) {
        if (x.round != y.round) continue;
        ConsState s;
        s.round = x.round;
        s.prefix.resize(x.round);
        for (int r = 0; r < x.round; ++r) s.prefix[r] = x.prefix[r] & y.prefix[r];
        states.push_back(std::move(s));
      }
    return make_conservative(n, a.horizon, std::move(states));
  }
  const int h = mixed_horizon(a, b, horizon_hint);
  Strategy ma = materialize_strategy(a, h), mb = materialize_strategy(b, h);
  std::vector<BoundedState> states;
  for (const BoundedState& x : ma.states)
    for (const BoundedState& y : mb.states) {
      if (x.round != y.round) continue;
      BoundedState s;
      s.round = x.round;
      s.by_round.resize(h + 1);
      for (int r = 0; r <= h; ++r) s.by_round[r] = x.by_round[r] & y.by_round[r];
      states.push_back(std::move(s));
    }
  return explicit_result(n, h, std::move(states));
}

Strategy strat_succeed(const Strategy& a, const Strategy& b,
                       int horizon_hint) {
  const int n = require_same_n(a, b);
  if (a.kind == StrategyKind::oblivious && b.kind == StrategyKind::oblivious) {
    // The concatenated states contribute exactly the second operand's
    // current-round views, so succession collapses to union.
    return strat_union(a, b);
  }
  if (a.kind == StrategyKind::conservative &&
      b.kind == StrategyKind::conservative && a.horizon == b.horizon) {
    std::vector<ConsState> states = a.nextsC;
    states.insert(states.end(), b.nextsC.begin(), b.nextsC.end());
    for (const ConsState& x : a.nextsC)
      for (const ConsState& y : b.nextsC)
        if (x.round + y.round <= a.horizon)
          states.push_back(concat_cons(x, y));
    return make_conservative(n, a.horizon, std::move(states));
  }
  const int h = mixed_horizon(a, b, horizon_hint);
  Strategy ma = materialize_strategy(a, h), mb = materialize_strategy(b, h);
  std::vector<BoundedState> states = ma.states;
  states.insert(states.end(), mb.states.begin(), mb.states.end());
  BoundedState s;
  for (const BoundedState& x : ma.states)
    for (const BoundedState& y : mb.states)
      if (concat_states(x, y, h, s)) states.push_back(s);
  return explicit_result(n, h, std::move(states));
}

Strategy strat_repeat(const Strategy& a, int horizon_hint) {
  if (a.kind == StrategyKind::oblivious) return a;  // fixed point
  if (a.kind == StrategyKind::conservative) {
    std::vector<ConsState> acc = a.nextsC;
    sort_dedup(acc);
    // Close under concatenation with the base payload, within the horizon.
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<ConsState> next = acc;
      for (const ConsState& x : acc)
        for (const ConsState& y : a.nextsC)
          if (x.round + y.round <= a.horizon) next.push_back(concat_cons(x, y));
      sort_dedup(next);
      if (next.size() != acc.size()) {
        acc = std::move(next);
        grew = true;
      }
    }
    return make_conservative(a.n, a.horizon, std::move(acc));
  }
  const int h = std::max(horizon_hint, a.horizon);
  if (h <= 0)
    throw std::invalid_argument("strat_repeat on this family needs a horizon");
  Strategy ma = materialize_strategy(a, h);
  std::vector<BoundedState> acc = ma.states;
  sort_dedup(acc);
  bool grew = true;
  BoundedState s;
  while (grew) {
    grew = false;
    std::vector<BoundedState> next = acc;
    for (const BoundedState& x : acc)
      for (const BoundedState& y : ma.states)
        if (concat_states(x, y, h, s)) next.push_back(s);
    sort_dedup(next);
    if (next.size() != acc.size()) {
      acc = std::move(next);
      grew = true;
    }
  }
  return explicit_result(a.n, h, std::move(acc));
}

}  // namespace heardof
