// Micro-benchmark comparing the OpenMP kernels against their serial
// reference twins on the enumeration-heavy paths.

#include <chrono>
#include <cstdio>

#include "heardof/analysis.hpp"
#include "heardof/execution.hpp"
#include "heardof/parallel.hpp"
#include "heardof/predicate.hpp"
#include "heardof/strategy.hpp"

using namespace heardof;

namespace {

double seconds(void (*fn)()) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void bench(const char* name, void (*serial)(), void (*parallel)()) {
  parallel_enabled() = false;
  const double s = seconds(serial);
  parallel_enabled() = true;
  const double p = seconds(parallel);
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx\n",
              name, s, p, s / (p > 0 ? p : 1e-9));
}

void crashf_serial() { (void)build_crashf_serial(3, 3, 1); }
void crashf_parallel() { (void)build_crashf(3, 3, 1); }

void hoprod_serial() { (void)ho_product_serial(f_n_minus_f(3, 1).nexts, 3, 3); }
void hoprod_parallel() { (void)ho_product(f_n_minus_f(3, 1).nexts, 3, 3); }

void enum_serial() {
  (void)naive_enumerate_ho(f_n_minus_f(3, 1), build_crashf(3, 2, 1));
}
void enum_parallel() {
  (void)enumerate_ho_bounded(f_n_minus_f(3, 1), build_crashf(3, 2, 1));
}

void combine_serial() {
  parallel_enabled() = false;
  const Predicate c1 = build_crashf(3, 2, 1);
  (void)combine_pred(c1, c1);
}
void combine_parallel() {
  const Predicate c1 = build_crashf(3, 2, 1);
  (void)combine_pred(c1, c1);
}

}  // namespace

int main() {
  set_enumeration_cap(200'000'000);
  std::printf("workers: %d\n", worker_count());
  bench("crashf filter n=3 R=3", crashf_serial, crashf_parallel);
  bench("hoprod n=3 R=3", hoprod_serial, hoprod_parallel);
  // the serial column here is the single-event reference walker;
  // the gap is algorithmic (window normalization), not thread count
  bench("ho enumeration crash(1)", enum_serial, enum_parallel);
  bench("combine crash(1)x2", combine_serial, combine_parallel);
  return 0;
}
