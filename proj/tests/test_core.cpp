#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "heardof/core.hpp"
#include "oracle.hpp"

using namespace heardof;

namespace {

Mask mk(std::initializer_list<int> ids) {
  Mask m = 0;
  for (int k : ids) m |= Mask(1) << k;
  return m;
}

}  // namespace

TEST_CASE("kernel is the intersection of the round's delivered sets") {
  CHECK(kernel(total_collection(3, 1), 1) == mk({0, 1, 2}));

  Collection c(3, 1);
  c.set(1, 0, mk({0, 1}));
  c.set(1, 1, mk({1, 2}));
  c.set(1, 2, mk({0, 1, 2}));
  CHECK(kernel(c, 1) == mk({1}));

  // a one-crash collection whose round-1 rows all equal the survivor set
  Collection crash(3, 2, full_mask(3));
  for (int p = 0; p < 3; ++p) {
    crash.set(1, p, mk({0, 1}));
    crash.set(2, p, mk({0, 1}));
  }
  CHECK(kernel(crash, 1) == mk({0, 1}));

  CHECK_THROWS_AS((void)kernel(c, 2), std::out_of_range);
  CHECK_THROWS_AS((void)kernel(c, 0), std::out_of_range);
}

TEST_CASE("state views") {
  const LocalState q2(2, {{2, 0}, {2, 2}});
  CHECK(obliv_view(q2) == mk({0, 2}));
  CHECK(obliv_view(LocalState(2, {{1, 0}, {1, 1}})) == 0);
  CHECK(obliv_view(LocalState(1, {{1, 0}, {1, 1}, {1, 2}})) == mk({0, 1, 2}));

  const LocalState mixed(1, {{1, 0}, {2, 1}});
  const LocalState filtered = cons_view(mixed);
  CHECK(filtered.round == 1);
  CHECK(filtered.mes == std::vector<Message>{{1, 0}});
  CHECK(cons_view(LocalState(3, {})).mes.empty());

  CHECK(after_view(LocalState(1, {{2, 0}, {2, 1}})) == mk({0, 1}));
  CHECK(after_view(LocalState(1, {{1, 0}})) == 0);
  CHECK(after_view(LocalState(2, {{3, 2}})) == mk({2}));
}

TEST_CASE("view identities on random states") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    const LocalState q = testing::random_state(rng, 3, 3);
    const LocalState cq = cons_view(q);
    CHECK(cons_view(cq).mes == cq.mes);              // idempotent
    CHECK(obliv_view(cq) == obliv_view(q));          // current round survives
    CHECK(after_view(cq) == 0);                      // future filtered out
  }
}

TEST_CASE("combine is pointwise intersection with total as identity") {
  std::mt19937 rng(11);
  const Collection total = total_collection(3, 2);
  for (int i = 0; i < 200; ++i) {
    const Collection a = testing::random_collection(rng, 3, 2);
    const Collection b = testing::random_collection(rng, 3, 2);
    const Collection c = testing::random_collection(rng, 3, 2);
    CHECK(combine_collections(a, total) == a);
    CHECK(combine_collections(a, a) == a);
    CHECK(combine_collections(a, b) == combine_collections(b, a));
    CHECK(combine_collections(a, combine_collections(b, c)) ==
          combine_collections(combine_collections(a, b), c));
  }
  Collection other(2, 2);
  CHECK_THROWS_AS((void)combine_collections(total, other),
                  std::invalid_argument);
}

TEST_CASE("combining two one-crash collections pins the survivor set") {
  auto crash_at_1 = [&](Mask sigma) {
    Collection c(3, 2, full_mask(3));
    for (int p = 0; p < 3; ++p) {
      c.set(1, p, sigma);
      c.set(2, p, sigma);
    }
    return c;
  };
  const Collection c = combine_collections(crash_at_1(mk({0, 1})),
                                           crash_at_1(mk({1, 2})));
  for (int p = 0; p < 3; ++p) CHECK(c.at(2, p) == mk({1}));
}

TEST_CASE("concatenation respects cuts and truncation") {
  std::mt19937 rng(13);
  for (int i = 0; i < 100; ++i) {
    const Collection a = testing::random_collection(rng, 3, 2);
    const Collection b = testing::random_collection(rng, 3, 2);
    CHECK(concat_collections(a, 0, b, 2) == b);
    CHECK(concat_collections(a, 2, b, 2) == a);
    const int cut = 1;
    const Collection glued = concat_collections(a, cut, b, 2);
    CHECK(concat_collections(glued, cut, b, 2) == glued);  // prefix stable
    for (int p = 0; p < 3; ++p) {
      CHECK(glued.at(1, p) == a.at(1, p));
      CHECK(glued.at(2, p) == b.at(1, p));
    }
  }
  Collection a(3, 2), b(3, 2);
  CHECK_THROWS_AS((void)concat_collections(a, 3, b, 2), std::invalid_argument);
}

TEST_CASE("collections pack to order-preserving keys") {
  std::mt19937 rng(17);
  REQUIRE(collection_packable(3, 2));
  for (int i = 0; i < 200; ++i) {
    const Collection a = testing::random_collection(rng, 3, 2);
    const Collection b = testing::random_collection(rng, 3, 2);
    CHECK(unpack_collection(pack_collection(a), 3, 2) == a);
    CHECK((a < b) == (pack_collection(a) < pack_collection(b)));
  }
}

TEST_CASE("universe and horizon guards") {
  CHECK_THROWS_AS(Collection(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Collection(13, 1), std::invalid_argument);
  CHECK_THROWS_AS(Collection(2, 0), std::invalid_argument);
  CHECK(process_name(0) == "p1");
  CHECK(mask_to_string(mk({0, 2}), 3) == "{p1,p3}");
}
