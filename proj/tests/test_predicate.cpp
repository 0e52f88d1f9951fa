#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "heardof/predicate.hpp"
#include "oracle.hpp"

using namespace heardof;

namespace {

Mask mk(std::initializer_list<int> ids) {
  Mask m = 0;
  for (int k : ids) m |= Mask(1) << k;
  return m;
}

}  // namespace

TEST_CASE("total predicate") {
  const Predicate p = build_total(2, 1);
  REQUIRE(p.collections.size() == 1);
  CHECK(p.collections[0].is_total());
  const Predicate q = build_total(3, 3);
  for (int r = 1; r <= 3; ++r) CHECK(kernel(q.collections[0], r) == mk({0, 1, 2}));
}

TEST_CASE("one crash at a round: enumeration oracle counts") {
  // n=2, R=2, r=1: survivor sets {p1},{p2},Pi; per-process round-1 choice
  // among its supersets gives 1 + 2*(2*2) = 9 members.
  CHECK(build_crash1_at(2, 2, 1).collections.size() == 9);
  // n=3, R=2: 1 + 3*2^3 = 25 at round 1; round 2 dedups the all-Pi pick of
  // each survivor set into the total collection: 1 + 3*(2^3 - 1) = 22.
  CHECK(build_crash1_at(3, 2, 1).collections.size() == 25);
  CHECK(build_crash1_at(3, 2, 2).collections.size() == 22);
  // the survivor set may be the whole universe
  CHECK(build_crash1_at(3, 2, 1).contains(total_collection(3, 2)));
  CHECK_THROWS_AS((void)build_crash1_at(3, 2, 3), std::out_of_range);

  // every member passes the one-crash filter clauses
  const Predicate p = build_crash1_at(3, 2, 1);
  const Predicate filtered = build_crashf(3, 2, 1);
  for (const Collection& c : p.collections) CHECK(filtered.contains(c));
}

TEST_CASE("crash filter: cardinality, kernel chain, extendability") {
  CHECK(build_crashf(3, 2, 0).collections ==
        build_total(3, 2).collections);  // F=0 forces Pi everywhere
  const Predicate p = build_crashf(3, 2, 1);
  CHECK(p.collections.size() == 43);
  for (const Collection& c : p.collections) {
    for (int r = 1; r <= 2; ++r)
      for (int q = 0; q < 3; ++q) CHECK(mask_card(c.at(r, q)) >= 2);
    for (int q = 0; q < 3; ++q) CHECK(mask_subset(c.at(2, q), kernel(c, 1)));
    CHECK(mask_card(kernel(c, 2)) >= 2);  // extends past the horizon
  }
  // the serial reference filter agrees
  CHECK(build_crashf_serial(3, 2, 1).collections == p.collections);
  CHECK(build_crashf_serial(3, 2, 2).collections ==
        build_crashf(3, 2, 2).collections);
}

TEST_CASE("table identity: crash(1) equals the union of per-round blocks") {
  const Predicate by_rounds =
      union_pred(build_crash1_at(3, 2, 1), build_crash1_at(3, 2, 2));
  CHECK(by_rounds.collections == build_crashf(3, 2, 1).collections);
}

TEST_CASE("loss budget enumeration") {
  CHECK(build_lossl(3, 2, 0).collections == build_total(3, 2).collections);
  const Predicate p = build_lossl(3, 2, 1);
  CHECK(p.collections.size() == 19);  // 1 + 6 slots * 3 senders
  CHECK(build_lossl(3, 2, 2).collections.size() == 172);  // 1 + 18 + C(18,2)
  for (const Collection& c : p.collections)
    for (int r = 1; r <= 2; ++r)
      for (int q = 0; q < 3; ++q) CHECK(mask_card(c.at(r, q)) >= 2);
}

TEST_CASE("operator identities") {
  const Predicate crash1 = build_crashf(3, 2, 1);
  const Predicate total = build_total(3, 2);
  CHECK(union_pred(crash1, crash1) == crash1);
  CHECK(combine_pred(crash1, total) == crash1);
  CHECK(repeat_pred(total) == total);

  // succession with the total predicate realizes crash-then-recover
  const Predicate recover = succeed_pred(crash1, total);
  CHECK(recover.contains(total_collection(3, 2)));
  Collection crashed_then_fine(3, 2, full_mask(3));
  for (int q = 0; q < 3; ++q) crashed_then_fine.set(1, q, mk({0, 1}));
  CHECK(recover.contains(crashed_then_fine));
  // the permanent crash (both rounds degraded) is also a member via cut=R
  Collection permanent(3, 2, full_mask(3));
  for (int q = 0; q < 3; ++q) {
    permanent.set(1, q, mk({0, 1}));
    permanent.set(2, q, mk({0, 1}));
  }
  CHECK(recover.contains(permanent));

  CHECK_THROWS_AS((void)union_pred(crash1, build_total(3, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_predicate(3, 2, {}, "empty"),
                  std::invalid_argument);
}

TEST_CASE("operators are commutative/associative and distribute") {
  const Predicate a = build_crash1_at(3, 2, 1);
  const Predicate b = build_crash1_at(3, 2, 2);
  const Predicate c = build_lossl(3, 2, 1);
  CHECK(union_pred(a, b) == union_pred(b, a));
  CHECK(combine_pred(a, b) == combine_pred(b, a));
  CHECK(union_pred(union_pred(a, b), c) == union_pred(a, union_pred(b, c)));
  CHECK(combine_pred(combine_pred(a, b), c) ==
        combine_pred(a, combine_pred(b, c)));
  CHECK(combine_pred(a, union_pred(b, c)) ==
        union_pred(combine_pred(a, b), combine_pred(a, c)));
}

TEST_CASE("repetition: members decompose into member prefixes") {
  const Predicate crash1 = build_crashf(3, 2, 1);
  const Predicate rep = repeat_pred(crash1);
  for (const Collection& c : crash1.collections) CHECK(rep.contains(c));
  for (const Collection& c : rep.collections)
    CHECK(testing::decomposes_into_prefixes(c, crash1));
  // a fresh crash per round is reachable only through two segments
  Collection two_crashes(3, 2, full_mask(3));
  for (int q = 0; q < 3; ++q) {
    two_crashes.set(1, q, mk({0, 1}));
    two_crashes.set(2, q, mk({1, 2}));
  }
  CHECK(rep.contains(two_crashes));
  CHECK(!crash1.contains(two_crashes));
}

TEST_CASE("structural property checkers") {
  const Predicate total = build_total(3, 2);
  const Predicate crash1 = build_crashf(3, 2, 1);
  const Predicate first = build_crash1_at(3, 2, 1);
  const Predicate last = build_crash1_at(3, 2, 2);
  const Predicate loss1 = build_lossl(3, 2, 1);

  CHECK(is_round_symmetric(total));
  CHECK(is_round_symmetric(crash1));
  CHECK(!is_round_symmetric(last));  // size-2 sets never appear at round 1

  CHECK(is_prefix_symmetric(total));
  CHECK(is_prefix_symmetric(crash1));
  CHECK(is_prefix_symmetric(last));

  // a predicate that singles out one process is not prefix symmetric
  Collection lopsided(3, 2, full_mask(3));
  lopsided.set(1, 0, mk({0, 1}));
  CHECK(!is_prefix_symmetric(
      make_predicate(3, 2, {lopsided, total_collection(3, 2)}, "literal")));

  CHECK(has_common_round(total));
  CHECK(has_common_round(crash1));
  CHECK(has_common_round(first));
  CHECK(!has_common_round(last));  // degraded sets cannot be staged at round 1
  CHECK(!has_common_round(loss1)); // a shared loss for everyone needs n losses

  CHECK(has_common_prefix(total));
  CHECK(has_common_prefix(crash1));
  CHECK(has_common_prefix(last));
  CHECK(!has_common_prefix(loss1));
}

TEST_CASE("operators preserve shape and nonemptiness on random pairs") {
  std::mt19937 rng(23);
  const Predicate pool[] = {build_total(3, 2), build_crashf(3, 2, 1),
                            build_crash1_at(3, 2, 2), build_lossl(3, 2, 1)};
  for (int i = 0; i < 20; ++i) {
    const Predicate& a = pool[rng() % 4];
    const Predicate& b = pool[rng() % 4];
    for (const Predicate& r :
         {union_pred(a, b), combine_pred(a, b), succeed_pred(a, b),
          repeat_pred(a)}) {
      CHECK(r.n == 3);
      CHECK(r.horizon == 2);
      CHECK(!r.collections.empty());
    }
  }
}

TEST_CASE("enumeration guardrail") {
  const std::uint64_t saved = enumeration_cap();
  set_enumeration_cap(100);
  CHECK_THROWS_AS((void)build_crashf(3, 2, 1), cap_error);
  try {
    (void)build_crashf(3, 2, 1);
  } catch (const cap_error& e) {
    CHECK(e.estimate == 4096);
  }
  set_enumeration_cap(saved);
}
