#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// The OpenMP kernels must be bit-identical to their serial twins, and
// identical to themselves with the parallel runtime disabled.

#include "heardof/analysis.hpp"
#include "heardof/execution.hpp"
#include "heardof/parallel.hpp"
#include "heardof/predicate.hpp"
#include "heardof/strategy.hpp"

using namespace heardof;

namespace {

struct SerialGuard {
  bool saved = parallel_enabled();
  ~SerialGuard() { parallel_enabled() = saved; }
};

}  // namespace

TEST_CASE("crash filter: parallel vs serial reference") {
  for (auto [n, R, F] : {std::tuple{2, 2, 1}, {3, 2, 1}, {3, 2, 2}, {2, 3, 2}})
    CHECK(build_crashf(n, R, F).collections ==
          build_crashf_serial(n, R, F).collections);
}

TEST_CASE("hoprod: parallel vs serial reference") {
  const std::vector<Mask> basis = f_n_minus_f(3, 1).nexts;
  CHECK(ho_product(basis, 3, 2).collections ==
        ho_product_serial(basis, 3, 2).collections);
}

TEST_CASE("kernels under a disabled parallel runtime") {
  const Predicate with = build_crashf(3, 2, 1);
  const Predicate combined_with = combine_pred(with, with);
  const HOEnumResult enum_with =
      enumerate_ho_bounded(f_n_minus_f(3, 1), with);
  {
    SerialGuard guard;
    parallel_enabled() = false;
    CHECK(build_crashf(3, 2, 1).collections == with.collections);
    CHECK(combine_pred(with, with).collections == combined_with.collections);
    CHECK(enumerate_ho_bounded(f_n_minus_f(3, 1), with).collections ==
          enum_with.collections);
  }
}

TEST_CASE("window engine vs single-event engine on mixed instances") {
  const Predicate p1 = build_lossl(2, 3, 1);
  const Strategy c1 = minimal_conservative(p1);
  CHECK(enumerate_ho_bounded(c1, p1).collections ==
        naive_enumerate_ho(c1, p1).collections);

  const Predicate p2 = union_pred(build_crash1_at(2, 2, 1),
                                  build_lossl(2, 2, 1));
  const Strategy f2 = f_loss(2);
  CHECK(enumerate_ho_bounded(f2, p2).collections ==
        naive_enumerate_ho(f2, p2).collections);
}
