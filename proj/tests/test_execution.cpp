#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "heardof/analysis.hpp"
#include "heardof/execution.hpp"
#include "heardof/json_io.hpp"
#include "oracle.hpp"

using namespace heardof;

namespace {

Mask mk(std::initializer_list<int> ids) {
  Mask m = 0;
  for (int k : ids) m |= Mask(1) << k;
  return m;
}

Execution make_trace(int n, int horizon, std::vector<Event> events) {
  return Execution{n, horizon, std::move(events)};
}

}  // namespace

TEST_CASE("well-formedness clauses") {
  CHECK(validate_execution(
      make_trace(2, 1, {Event::make_deliver(1, 0, 1), Event::make_next(1)})));
  // delivery before the sender reached the sending round
  const CheckResult early =
      validate_execution(make_trace(2, 2, {Event::make_deliver(2, 0, 1)}));
  CHECK(!early.ok);
  CHECK(early.index == 0);
  // once stopped, forever stopped
  CHECK(!validate_execution(
      make_trace(2, 1, {Event::make_stop(), Event::make_next(0)})));
  // unique delivery
  CHECK(!validate_execution(make_trace(2, 1, {Event::make_deliver(1, 0, 1),
                                              Event::make_deliver(1, 0, 1)})));
}

TEST_CASE("local states count prior nexts and receipts") {
  const Execution t = make_trace(
      2, 2, {Event::make_deliver(1, 0, 1), Event::make_next(1)});
  CHECK(local_state(t, 1, 0).round == 1);
  CHECK(local_state(t, 1, 0).mes.empty());
  const LocalState q = local_state(t, 1, 2);
  CHECK(q.round == 2);
  CHECK(q.mes == std::vector<Message>{{1, 0}});
  CHECK_THROWS_AS((void)local_state(t, 1, 99), std::out_of_range);
}

TEST_CASE("late receipts are delivered but not heard") {
  // k1 and k2 reach j before its round change, k3 after (receiver j = 3).
  std::vector<Event> ev;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      if (!(j == 3 && k == 2)) ev.push_back(Event::make_deliver(1, k, j));
  ev.push_back(Event::make_next(3));
  ev.push_back(Event::make_deliver(1, 2, 3));  // k3's message arrives late
  for (int p = 0; p < 3; ++p) ev.push_back(Event::make_next(p));
  const Execution t = make_trace(4, 1, std::move(ev));
  REQUIRE(validate_execution(t));
  const Collection ho = extract_heardof(t);
  CHECK(ho.at(1, 3) == mk({0, 1, 3}));  // heard: everyone but k3
  CHECK(is_execution_of_collection(t, total_collection(4, 1)));  // delivered
}

TEST_CASE("execution-of-collection biconditional") {
  const Collection ctotal = total_collection(2, 1);
  Collection ho(2, 1, full_mask(2));
  const Execution can = canonical_execution(ho);
  CHECK(is_execution_of_collection(can, ctotal));
  // dropping a mandated delivery breaks it
  Execution dropped = can;
  dropped.events.erase(dropped.events.begin());
  CHECK(!is_execution_of_collection(dropped, ctotal));
  // delivering something the collection does not mandate breaks it
  Collection partial(2, 1, full_mask(2));
  partial.set(1, 1, mk({1}));
  CHECK(!is_execution_of_collection(can, partial));
}

TEST_CASE("canonical execution of the total heard-of collection, n=2 R=1") {
  const Execution t = canonical_execution(total_collection(2, 1));
  REQUIRE(t.events.size() == 6);
  for (int i = 0; i < 4; ++i)
    CHECK(t.events[i].type == Event::Type::deliver);
  CHECK(t.events[4] == Event::make_next(0));
  CHECK(t.events[5] == Event::make_next(1));
}

TEST_CASE("canonical trace text is stable (golden)") {
  Collection ho(2, 2, full_mask(2));
  ho.set(1, 1, Mask(1) << 1);  // p2 hears only itself at round 1
  const Execution t = canonical_execution(ho);
  const char* expected =
      "D 1 0 0\n"
      "D 1 1 0\n"
      "D 1 1 1\n"
      "N 0\n"
      "N 1\n"
      "D 1 0 1\n"  // the leftover arrives one phase late
      "D 2 0 0\n"
      "D 2 0 1\n"
      "D 2 1 0\n"
      "D 2 1 1\n"
      "N 0\n"
      "N 1\n";
  CHECK(heardof::trace_to_text(t) == expected);
}

TEST_CASE("extract of canonical is the identity") {
  std::mt19937 rng(47);
  for (int i = 0; i < 300; ++i) {
    const Collection ho = testing::random_collection(rng, 3, 2);
    const Execution can = canonical_execution(ho);
    CHECK(validate_execution(can));
    CHECK(extract_heardof(can) == ho);
    CHECK(is_execution_of_collection(can, total_collection(3, 2)));
    // the reversed event order changes the trace but not the extraction
    const Execution rev = canonical_execution(ho, EventOrder::reversed);
    CHECK(extract_heardof(rev) == ho);
  }
}

TEST_CASE("standard execution: full crash-free run") {
  const Strategy f = f_n_minus_f(3, 1);
  const Collection c = total_collection(3, 2);
  const Execution t = standard_execution(f, c);
  int delivers = 0, nexts = 0, stops = 0;
  for (const Event& e : t.events) {
    if (e.type == Event::Type::deliver) ++delivers;
    if (e.type == Event::Type::next) ++nexts;
    if (e.type == Event::Type::stop) ++stops;
  }
  CHECK(delivers == 18);  // 9 round-1 and 9 round-2 deliveries
  CHECK(nexts == 6);
  CHECK(stops == 0);
  CHECK(extract_heardof(t) == total_collection(3, 2));
}

TEST_CASE("standard execution: the empty strategy stops after round one") {
  const Strategy empty = make_oblivious(2, {});
  const Execution t = standard_execution(empty, total_collection(2, 2));
  REQUIRE(!t.events.empty());
  CHECK(t.events.back().type == Event::Type::stop);
  int nexts = 0;
  for (const Event& e : t.events)
    if (e.type == Event::Type::next) ++nexts;
  CHECK(nexts == 0);
  CHECK(is_execution_of_strategy(t, empty));  // blocked but never enabled
}

TEST_CASE("standard execution satisfies the correctness lemma") {
  std::mt19937 rng(53);
  for (int i = 0; i < 300; ++i) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const int R = 1 + static_cast<int>(rng() % 2);
    const Predicate p = rng() % 2 ? build_crashf(n, R, 1)
                                  : build_lossl(n, R, 1);
    const Collection& c = p.collections[rng() % p.collections.size()];
    std::vector<Mask> nexts;
    for (Mask m = 0; m <= full_mask(n); ++m)
      if (rng() % 2) nexts.push_back(m);
    if (nexts.empty()) nexts.push_back(full_mask(n));
    const Strategy f = make_oblivious(n, std::move(nexts));
    const Execution st = standard_execution(f, c);
    CHECK(validate_execution(st));
    CHECK(is_execution_of_collection(st, c));
    CHECK(is_execution_of_strategy(st, f));
    // order independence of the generated heard-of collection
    const Execution st_rev = standard_execution(f, c, EventOrder::reversed);
    bool complete = true;
    {
      std::vector<int> done(n, 0);
      for (const Event& e : st.events)
        if (e.type == Event::Type::next) ++done[e.process];
      for (int q = 0; q < n; ++q)
        if (done[q] < R) complete = false;
    }
    if (complete) CHECK(extract_heardof(st) == extract_heardof(st_rev));
  }
}

TEST_CASE("strategy-execution check flags bad nexts and unfairness") {
  const Predicate crash1 = build_crashf(3, 2, 1);
  const Strategy min = minimal_oblivious(crash1);
  Execution t = standard_execution(min, crash1.collections.front());
  // an immediate next from the empty state is outside every minimal payload
  Execution bad = t;
  bad.events.insert(bad.events.begin(), Event::make_next(0));
  CHECK(!is_execution_of_strategy(bad, min));
  // removing the nexts of an enabled process trips the fairness surrogate
  Execution unfair = t;
  unfair.events.erase(
      std::remove(unfair.events.begin(), unfair.events.end(),
                  Event::make_next(0)),
      unfair.events.end());
  const CheckResult r = check_execution_of_strategy(unfair, min);
  CHECK(!r.ok);
  CHECK(r.reason.find("fairness") != std::string::npos);
}

TEST_CASE("extract requires a complete trace") {
  Execution t = make_trace(2, 1, {Event::make_next(0)});
  try {
    (void)extract_heardof(t);
    FAIL("expected an incomplete-trace error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("p2") != std::string::npos);
  }
}

TEST_CASE("shifted canonical execution") {
  // no deficiency: identical to the canonical execution
  const Collection ho_total = total_collection(3, 2);
  CHECK(shifted_canonical_execution(ho_total).events ==
        canonical_execution(ho_total).events);

  // a round-1 deficiency at p3: its next comes after two round-2 receipts
  Collection ho(3, 2, full_mask(3));
  ho.set(1, 2, mk({0, 1}));
  const Execution sh = shifted_canonical_execution(ho);
  CHECK(validate_execution(sh));
  CHECK(extract_heardof(sh) == ho);
  CHECK(is_execution_of_strategy(sh, f_loss(3)));
  std::size_t next_p3 = 0;
  int round2_to_p3_before = 0;
  for (std::size_t i = 0; i < sh.events.size(); ++i) {
    const Event& e = sh.events[i];
    if (e == Event::make_next(2)) {
      next_p3 = i;
      break;
    }
    if (e.type == Event::Type::deliver && e.round == 2 && e.process == 2)
      ++round2_to_p3_before;
  }
  CHECK(round2_to_p3_before == 2);
  CHECK(next_p3 > 0);

  Collection too_lossy(3, 2, full_mask(3));
  too_lossy.set(1, 0, mk({0}));
  CHECK_THROWS_AS((void)shifted_canonical_execution(too_lossy),
                  std::domain_error);
}

TEST_CASE("shifted canonical regenerates every reachable member") {
  for (const Collection& ho : testing::all_collections(3, 2)) {
    if (!testing::floss_reachable(ho)) continue;
    const Execution sh = shifted_canonical_execution(ho);
    CHECK(validate_execution(sh));
    CHECK(extract_heardof(sh) == ho);
    CHECK(is_execution_of_strategy(sh, f_loss(3)));
  }
}

TEST_CASE("enumeration agrees with the single-event reference engine") {
  // oblivious
  {
    const Predicate p = build_crashf(2, 2, 1);
    const Strategy f = f_n_minus_f(2, 1);
    const HOEnumResult fast = enumerate_ho_bounded(f, p);
    const HOEnumResult slow = naive_enumerate_ho(f, p);
    REQUIRE(slow.exact);
    CHECK(fast.collections == slow.collections);
  }
  // conservative
  {
    const Predicate p = build_crash1_at(2, 2, 2);
    const Strategy f = minimal_conservative(p);
    const HOEnumResult fast = enumerate_ho_bounded(f, p);
    const HOEnumResult slow = naive_enumerate_ho(f, p);
    REQUIRE(slow.exact);
    CHECK(fast.collections == slow.collections);
  }
  // future-looking
  {
    const Predicate p = build_lossl(2, 2, 1);
    const Strategy f = f_loss(2);
    const HOEnumResult fast = enumerate_ho_bounded(f, p);
    const HOEnumResult slow = naive_enumerate_ho(f, p);
    REQUIRE(slow.exact);
    CHECK(fast.collections == slow.collections);
  }
  // explicit materialization of a conservative strategy changes nothing
  {
    const Predicate p = build_total(2, 2);
    const Strategy f = minimal_conservative(p);
    const Strategy e = materialize_strategy(f, 2);
    CHECK(enumerate_ho_bounded(f, p).collections ==
          enumerate_ho_bounded(e, p).collections);
  }
}

TEST_CASE("f_loss enumeration matches the reachable characterization") {
  const HOEnumResult got = enumerate_ho_bounded(f_loss(3), build_lossl(3, 2, 1));
  REQUIRE(got.exact);
  std::vector<Collection> expected;
  for (const Collection& ho : testing::all_collections(3, 2))
    if (testing::floss_reachable(ho)) expected.push_back(ho);
  std::sort(expected.begin(), expected.end());
  CHECK(got.collections == expected);
  CHECK(got.collections.size() == 82);
}

TEST_CASE("budget exhaustion is flagged, never silent") {
  const HOEnumResult r =
      enumerate_ho_bounded(f_n_minus_f(3, 1), build_crashf(3, 2, 1), 50);
  CHECK(!r.exact);
}

TEST_CASE("deadlock search") {
  // waiting for everyone deadlocks under a single crash
  const DeadlockWitness w =
      find_deadlock(make_oblivious(3, {full_mask(3)}), build_crashf(3, 2, 1));
  CHECK(w.found);
  CHECK(!w.description.empty());
  // the folklore strategy does not
  CHECK(!find_deadlock(f_n_minus_f(3, 1), build_crashf(3, 2, 1)).found);
  // f_loss survives one loss, even one in the last round
  CHECK(!find_deadlock(f_loss(3), build_lossl(3, 2, 1)).found);
  // ... but a conservative strategy that insists on full rounds does not
  CHECK(find_deadlock(minimal_conservative(build_total(3, 2)),
                      build_lossl(3, 2, 1))
            .found);
}

TEST_CASE("oblivious validity criterion agrees with the deadlock search") {
  std::mt19937 rng(59);
  const Predicate pool[] = {build_total(2, 2), build_crashf(2, 2, 1),
                            build_lossl(2, 2, 1)};
  for (int i = 0; i < 40; ++i) {
    const Predicate& p = pool[rng() % 3];
    std::vector<Mask> nexts;
    for (Mask m = 0; m <= full_mask(2); ++m)
      if (rng() % 2) nexts.push_back(m);
    if (nexts.empty()) nexts.push_back(0);
    const Strategy f = make_oblivious(2, std::move(nexts));
    CHECK(oblivious_valid_for(f, p) == !find_deadlock(f, p).found);
  }
}
