#include "heardof/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>

#include "heardof/parallel.hpp"

namespace heardof {

namespace {

using nlohmann::json;

json mask_json(Mask m, int n) {
  json arr = json::array();
  for (int k = 0; k < n; ++k)
    if (m & (Mask(1) << k)) arr.push_back(k);
  return arr;
}

json collection_sets_json(const Collection& c) {
  json rounds = json::array();
  for (int r = 1; r <= c.horizon; ++r) {
    json row = json::array();
    for (int p = 0; p < c.n; ++p) row.push_back(mask_json(c.at(r, p), c.n));
    rounds.push_back(std::move(row));
  }
  return rounds;
}

void sort_dedup(std::vector<Collection>& cs) {
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

}  // namespace

HeardOfPredicate ho_product_serial(std::vector<Mask> basis, int n,
                                   int horizon) {
  check_universe(n);
  check_horizon(horizon);
  std::sort(basis.begin(), basis.end());
  basis.erase(std::unique(basis.begin(), basis.end()), basis.end());
  if (basis.empty())
    throw std::invalid_argument("ho_product: empty generating family");
  const int slots = n * horizon;
  std::uint64_t total = 1;
  for (int i = 0; i < slots; ++i) {
    total *= basis.size();
    if (total > enumeration_cap())
      throw cap_error("ho_product: size exceeds cap", total);
  }
  HeardOfPredicate out;
  out.n = n;
  out.horizon = horizon;
  out.tag = HOGenerator::hoprod;
  out.basis = basis;
  out.collections.reserve(total);
  for (std::uint64_t i = 0; i < total; ++i) {
    Collection c(n, horizon);
    std::uint64_t rest = i;
    for (int s = slots - 1; s >= 0; --s) {
      c.sets[s] = basis[rest % basis.size()];
      rest /= basis.size();
    }
    out.collections.push_back(std::move(c));
  }
  sort_dedup(out.collections);
  return out;
}

HeardOfPredicate ho_product(std::vector<Mask> basis, int n, int horizon) {
  check_universe(n);
  check_horizon(horizon);
  std::sort(basis.begin(), basis.end());
  basis.erase(std::unique(basis.begin(), basis.end()), basis.end());
  if (basis.empty())
    throw std::invalid_argument("ho_product: empty generating family");
  const int slots = n * horizon;
  std::uint64_t total = 1;
  for (int i = 0; i < slots; ++i) {
    total *= basis.size();
    if (total > enumeration_cap())
      throw cap_error("ho_product: size exceeds cap", total);
  }
  HeardOfPredicate out;
  out.n = n;
  out.horizon = horizon;
  out.tag = HOGenerator::hoprod;
  out.basis = basis;
  std::vector<Collection> acc(total, Collection(n, horizon));
#pragma omp parallel for if (parallel_enabled()) schedule(static)
  for (long long i = 0; i < static_cast<long long>(total); ++i) {
    std::uint64_t rest = static_cast<std::uint64_t>(i);
    for (int s = slots - 1; s >= 0; --s) {
      acc[i].sets[s] = basis[rest % basis.size()];
      rest /= basis.size();
    }
  }
  out.collections = std::move(acc);
  sort_dedup(out.collections);
  return out;
}

bool in_ho_product(const Collection& ho, const std::vector<Mask>& basis) {
  for (Mask m : ho.sets)
    if (!std::binary_search(basis.begin(), basis.end(), m)) return false;
  return true;
}

HeardOfPredicate generate_ho_oblivious(const Strategy& f, const Predicate& p) {
  if (f.kind != StrategyKind::oblivious)
    throw std::invalid_argument(
        "generate_ho_oblivious expects an oblivious strategy");
  if (!p.has_total())
    throw std::invalid_argument(
        "generate_ho_oblivious: predicate lacks the total collection");
  if (!oblivious_valid_for(f, p))
    throw std::invalid_argument(
        "generate_ho_oblivious: strategy is not valid for the predicate");
  return ho_product(f.nexts, p.n, p.horizon);
}

HeardOfPredicate generate_ho_enumerated(const Strategy& f, const Predicate& p,
                                        std::uint64_t budget) {
  HOEnumResult r = enumerate_ho_bounded(f, p, budget);
  HeardOfPredicate out;
  out.n = p.n;
  out.horizon = p.horizon;
  out.tag = HOGenerator::enumerated;
  out.exact = r.exact;
  out.collections = std::move(r.collections);
  return out;
}

std::vector<Mask> conservative_upper_bound_basis(PredOp op,
                                                 const Predicate& p1,
                                                 const Predicate& p2) {
  const std::vector<Mask> n1 = delivered_sets(p1);
  std::vector<Mask> basis;
  switch (op) {
    case PredOp::union_op:
    case PredOp::succeed_op: {
      basis = n1;
      const std::vector<Mask> n2 = delivered_sets(p2);
      basis.insert(basis.end(), n2.begin(), n2.end());
      break;
    }
    case PredOp::combine_op: {
      for (Mask a : n1)
        for (Mask b : delivered_sets(p2)) basis.push_back(a & b);
      break;
    }
    case PredOp::repeat_op:
      basis = n1;
      break;
  }
  std::sort(basis.begin(), basis.end());
  basis.erase(std::unique(basis.begin(), basis.end()), basis.end());
  return basis;
}

HeardOfPredicate conservative_ho_upper_bound(const Strategy& f1_cons,
                                             const Strategy& f2_cons,
                                             PredOp op, const Predicate& p1,
                                             const Predicate& p2) {
  if (!p1.has_total() || !p2.has_total())
    throw std::invalid_argument(
        "conservative_ho_upper_bound: operands must contain the total "
        "collection");
  if (!conservative_valid_for(f1_cons, p1) ||
      (op != PredOp::repeat_op && !conservative_valid_for(f2_cons, p2)))
    throw std::invalid_argument(
        "conservative_ho_upper_bound: strategy not valid for its predicate");
  return ho_product(conservative_upper_bound_basis(op, p1, p2), p1.n,
                    p1.horizon);
}

// ---------------------------------------------------------------------------
// Theorem suite.

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  std::int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

struct SuiteContext {
  SuiteConfig cfg;
  Predicate total, crashf1, lossl1, crash1_first, crash1_last, crash1_union;
  Strategy fnf1;

  explicit SuiteContext(const SuiteConfig& cfg_) : cfg(cfg_) {
    const int n = cfg.n, R = cfg.horizon;
    total = build_total(n, R);
    crashf1 = build_crashf(n, R, 1);
    lossl1 = build_lossl(n, R, 1);
    crash1_first = build_crash1_at(n, R, 1);
    crash1_last = build_crash1_at(n, R, R);
    crash1_union = crash1_first;
    for (int r = 2; r <= R; ++r)
      crash1_union = union_pred(crash1_union, build_crash1_at(n, R, r));
    crash1_union.expr = "crash1";
    fnf1 = f_n_minus_f(n, 1);
  }
};

json diff_witness(const std::vector<Collection>& got,
                  const std::vector<Collection>& expected) {
  json w;
  w["got_size"] = got.size();
  w["expected_size"] = expected.size();
  std::vector<Collection> missing, extra;
  std::set_difference(expected.begin(), expected.end(), got.begin(), got.end(),
                      std::back_inserter(missing));
  std::set_difference(got.begin(), got.end(), expected.begin(), expected.end(),
                      std::back_inserter(extra));
  w["missing_count"] = missing.size();
  w["extra_count"] = extra.size();
  if (!missing.empty()) w["first_missing"] = collection_sets_json(missing[0]);
  if (!extra.empty()) w["first_extra"] = collection_sets_json(extra[0]);
  return w;
}

TheoremReport c01_fnf_characterization(const SuiteContext& ctx, EventOrder) {
  const int n = ctx.cfg.n, R = ctx.cfg.horizon;
  TheoremReport rep;
  rep.theorem = "c01-fnf-heardof-characterization";
  rep.params = {{"n", n}, {"horizon", R}, {"F", 1}};
  const HeardOfPredicate expect = ho_product(ctx.fnf1.nexts, n, R);
  const HOEnumResult got =
      enumerate_ho_bounded(ctx.fnf1, ctx.crashf1, ctx.cfg.budget);
  rep.params["expected_size"] = expect.collections.size();
  rep.params["enumerated_size"] = got.collections.size();
  if (!got.exact)
    rep.verdict = "partial-budget";
  else if (got.collections == expect.collections)
    rep.verdict = "holds-at-horizon";
  else {
    rep.verdict = "fails";
    rep.witness = diff_witness(got.collections, expect.collections);
  }
  return rep;
}

TheoremReport c02_validity_criteria(const SuiteContext& ctx, EventOrder) {
  const int n = ctx.cfg.n, R = ctx.cfg.horizon;
  TheoremReport rep;
  rep.theorem = "c02-validity-criteria";
  rep.params = {{"n", n}, {"horizon", R}};
  json failures = json::array();

  if (!oblivious_valid_for(ctx.fnf1, ctx.crashf1))
    failures.push_back("f_{n-1} reported invalid for crash(1)");
  const std::vector<Mask> dsets = delivered_sets(ctx.crashf1);
  for (Mask s : ctx.fnf1.nexts) {
    if (!std::binary_search(dsets.begin(), dsets.end(), s)) continue;
    std::vector<Mask> reduced;
    for (Mask m : ctx.fnf1.nexts)
      if (m != s) reduced.push_back(m);
    if (oblivious_valid_for(make_oblivious(n, reduced), ctx.crashf1))
      failures.push_back("dropping delivered set " + mask_to_string(s, n) +
                         " did not flip the oblivious verdict");
  }

  const Strategy lift = conservative_lift(ctx.fnf1, R);
  if (!conservative_valid_for(lift, ctx.crashf1))
    failures.push_back("conservative lift reported invalid for crash(1)");
  const Strategy min_cons = minimal_conservative(ctx.crashf1);
  for (const ConsState& s : min_cons.nextsC) {
    std::vector<ConsState> reduced;
    for (const ConsState& t : lift.nextsC)
      if (!(t == s)) reduced.push_back(t);
    if (conservative_valid_for(make_conservative(n, R, reduced), ctx.crashf1))
      failures.push_back("dropping a minimal prefix did not flip the "
                         "conservative verdict");
  }

  rep.params["oblivious_removals"] = ctx.fnf1.nexts.size();
  rep.params["conservative_removals"] = min_cons.nextsC.size();
  if (failures.empty())
    rep.verdict = "holds-at-horizon";
  else {
    rep.verdict = "fails";
    rep.witness = failures;
  }
  return rep;
}

TheoremReport c03_standard_execution(const SuiteContext& ctx,
                                     EventOrder order) {
  TheoremReport rep;
  rep.theorem = "c03-standard-execution";
  std::mt19937 rng(ctx.cfg.seed);
  const int samples = ctx.cfg.sample_count;
  rep.params = {{"samples", samples}, {"seed", ctx.cfg.seed}};
  json failures = json::array();

  for (int it = 0; it < samples; ++it) {
    const int n = 2 + static_cast<int>(rng() % 2);       // 2..3
    const int R = 1 + static_cast<int>(rng() % 3);       // 1..3
    Predicate p;
    switch (rng() % 5) {
      case 0: p = build_total(n, R); break;
      case 1: p = build_crashf(n, R, 1); break;
      case 2:
        // the unconstrained-crash table blows the cap at n=3, R=3
        p = (n * R > 6) ? build_lossl(n, R, 2) : build_crashf(n, R, n);
        break;
      case 3: p = build_lossl(n, R, 1); break;
      default: p = build_crash1_at(n, R, 1 + static_cast<int>(rng() % R));
    }
    const Collection& c = p.collections[rng() % p.collections.size()];

    Strategy f;
    if (rng() % 2 == 0) {
      std::vector<Mask> nexts;
      for (Mask m = 0; m <= full_mask(n); ++m)
        if (rng() % 2) nexts.push_back(m);
      if (nexts.empty()) nexts.push_back(full_mask(n));
      f = make_oblivious(n, std::move(nexts));
    } else {
      std::vector<ConsState> states;
      std::vector<Mask> stackp;
      auto gen = [&](auto&& self, int round) -> void {
        if (round > R) return;
        for (Mask m = 0; m <= full_mask(n); ++m) {
          stackp.push_back(m);
          if (rng() % 4 == 0)
            states.push_back(ConsState{round, stackp});
          self(self, round + 1);
          stackp.pop_back();
        }
      };
      gen(gen, 1);
      if (states.empty())
        states.push_back(ConsState{1, {full_mask(n)}});
      f = make_conservative(n, R, std::move(states));
    }

    const Execution st = standard_execution(f, c, order);
    const CheckResult wf = validate_execution(st);
    const bool of_c = is_execution_of_collection(st, c);
    const CheckResult of_f = check_execution_of_strategy(st, f);
    if (!wf.ok || !of_c || !of_f.ok) {
      json item;
      item["sample"] = it;
      item["n"] = n;
      item["horizon"] = R;
      item["predicate"] = p.expr;
      if (!wf.ok) item["well_formed"] = wf.reason;
      if (!of_c) item["execution_of_collection"] = false;
      if (!of_f.ok) item["execution_of_strategy"] = of_f.reason;
      failures.push_back(std::move(item));
    }
  }

  if (failures.empty())
    rep.verdict = "holds-at-horizon";
  else {
    rep.verdict = "fails";
    rep.witness = failures;
  }
  return rep;
}

TheoremReport c04_canonical_execution(const SuiteContext& ctx,
                                      EventOrder order) {
  const int n = ctx.cfg.n, R = ctx.cfg.horizon;
  TheoremReport rep;
  rep.theorem = "c04-canonical-execution";
  const HeardOfPredicate hos = ho_product(ctx.fnf1.nexts, n, R);
  rep.params = {{"n", n}, {"horizon", R}, {"count", hos.collections.size()}};
  const Collection ctotal = total_collection(n, R);
  json failures = json::array();
  for (const Collection& ho : hos.collections) {
    const Execution can = canonical_execution(ho, order);
    if (!validate_execution(can).ok || extract_heardof(can) != ho ||
        !is_execution_of_collection(can, ctotal)) {
      failures.push_back(collection_sets_json(ho));
      if (failures.size() >= 3) break;
    }
  }
  if (failures.empty())
    rep.verdict = "holds-at-horizon";
  else {
    rep.verdict = "fails";
    rep.witness = failures;
  }
  return rep;
}

std::vector<const Predicate*> oblivious_pool(const SuiteContext& ctx) {
  std::vector<const Predicate*> pool{&ctx.crashf1, &ctx.crash1_first,
                                     &ctx.total};
  if (ctx.cfg.horizon >= 2) pool.insert(pool.begin() + 2, &ctx.crash1_last);
  return pool;
}

TheoremReport c05_oblivious_composition(const SuiteContext& ctx, EventOrder) {
  TheoremReport rep;
  rep.theorem = "c05-oblivious-composition";
  const auto pool = oblivious_pool(ctx);
  rep.params = {{"n", ctx.cfg.n},
                {"horizon", ctx.cfg.horizon},
                {"operands", pool.size()}};
  json failures = json::array();
  auto flag = [&](const std::string& s) { failures.push_back(s); };

  for (const Predicate* a : pool) {
    const Strategy ma = minimal_oblivious(*a);
    if (!(minimal_oblivious(repeat_pred(*a)).nexts == ma.nexts))
      flag("repetition is not a fixed point for " + a->expr);
    for (const Predicate* b : pool) {
      const Strategy mb = minimal_oblivious(*b);
      const Strategy u = strat_union(ma, mb);
      if (!(minimal_oblivious(union_pred(*a, *b)).nexts == u.nexts))
        flag("union mismatch for " + a->expr + ", " + b->expr);
      if (!(minimal_oblivious(succeed_pred(*a, *b)).nexts == u.nexts))
        flag("succession mismatch for " + a->expr + ", " + b->expr);
      if (is_round_symmetric(*a) && is_round_symmetric(*b)) {
        if (!(minimal_oblivious(combine_pred(*a, *b)).nexts ==
              strat_combine(ma, mb).nexts))
          flag("combination mismatch for " + a->expr + ", " + b->expr);
      }
    }
  }
  if (failures.empty())
    rep.verdict = "holds-at-horizon";
  else {
    rep.verdict = "fails";
    rep.witness = failures;
  }
  return rep;
}

TheoremReport c06_crash_combination_identity(const SuiteContext& ctx,
                                             EventOrder) {
  const int n = ctx.cfg.n, R = ctx.cfg.horizon;
  TheoremReport rep;
  rep.theorem = "c06-crash-combination-identity";
  const Predicate lhs = combine_pred(ctx.crash1_union, ctx.crash1_union);
  const Predicate rhs = build_crashf(n, R, 2);
  rep.params = {{"n", n},
                {"horizon", R},
                {"combined_size", lhs.collections.size()},
                {"direct_size", rhs.collections.size()}};
  if (lhs.collections == rhs.collections)
    rep.verdict = "holds-at-horizon";
  else {
    rep.verdict = "fails";
    rep.witness = diff_witness(lhs.collections, rhs.collections);
  }
  return rep;
}

TheoremReport c07_hoprod_lemma(const SuiteContext& ctx, EventOrder) {
  const int n = ctx.cfg.n;
  TheoremReport rep;
  rep.theorem = "c07-hoprod-lemma";
  json failures = json::array();
  bool partial = false;
  int checked = 0;

  for (const Predicate* p : {&ctx.crashf1, &ctx.lossl1}) {
    const Strategy min = minimal_oblivious(*p);
    std::vector<Mask> extras;
    for (Mask m = 0; m <= full_mask(n); ++m)
      if (!std::binary_search(min.nexts.begin(), min.nexts.end(), m))
        extras.push_back(m);
    if (extras.size() > 10) {  // enumerable under the cap only
      partial = true;
      continue;
    }
    for (std::uint64_t pick = 0; pick < (1ull << extras.size()); ++pick) {
      std::vector<Mask> nexts = min.nexts;
      for (std::size_t i = 0; i < extras.size(); ++i)
        if (pick >> i & 1) nexts.push_back(extras[i]);
      const Strategy f = make_oblivious(n, std::move(nexts));
      const HOEnumResult got = enumerate_ho_bounded(f, *p, ctx.cfg.budget);
      if (!got.exact) {
        partial = true;
        continue;
      }
      const HeardOfPredicate expect =
          ho_product(f.nexts, p->n, p->horizon);
      ++checked;
      if (!(got.collections == expect.collections))
        failures.push_back("mismatch on " + p->expr + " with " +
                           std::to_string(f.nexts.size()) + " nexts");
    }
  }
  rep.params = {{"n", n}, {"horizon", ctx.cfg.horizon}, {"checked", checked}};
  if (!failures.empty()) {
    rep.verdict = "fails";
    rep.witness = failures;
  } else
    rep.verdict = partial ? "partial-budget" : "holds-at-horizon";
  return rep;
}

TheoremReport c08_conservative_composition(const SuiteContext& ctx,
                                           EventOrder) {
  TheoremReport rep;
  rep.theorem = "c08-conservative-composition-bounds";
  std::vector<const Predicate*> pool;
  for (const Predicate* p : oblivious_pool(ctx))
    if (is_prefix_symmetric(*p)) pool.push_back(p);
  rep.params = {{"n", ctx.cfg.n},
                {"horizon", ctx.cfg.horizon},
                {"prefix_symmetric_operands", pool.size()}};
  json failures = json::array();
  bool partial = false;
  auto flag = [&](const std::string& s) { failures.push_back(s); };

  auto contained = [&](const Strategy& f, const Predicate& p,
                       const std::vector<Mask>& basis,
                       const std::string& label) {
    const HOEnumResult got = enumerate_ho_bounded(f, p, ctx.cfg.budget);
    if (!got.exact) {
      partial = true;
      return;
    }
    for (const Collection& h : got.collections)
      if (!in_ho_product(h, basis)) {
        flag("upper bound violated: " + label);
        return;
      }
  };

  for (const Predicate* a : pool) {
    const Strategy ma = minimal_conservative(*a);
    const Predicate rep_a = repeat_pred(*a);
    const Strategy mr = strat_repeat(ma);
    if (!(minimal_conservative(rep_a).nextsC == mr.nextsC))
      flag("repetition payload mismatch for " + a->expr);
    contained(mr, rep_a,
              conservative_upper_bound_basis(PredOp::repeat_op, *a, *a),
              "repetition of " + a->expr);
    for (const Predicate* b : pool) {
      const Strategy mb = minimal_conservative(*b);
      const Predicate pu = union_pred(*a, *b);
      const Predicate pc = combine_pred(*a, *b);
      const Predicate ps = succeed_pred(*a, *b);
      const Strategy fu = strat_union(ma, mb);
      const Strategy fc = strat_combine(ma, mb);
      const Strategy fs = strat_succeed(ma, mb);
      if (!(minimal_conservative(pu).nextsC == fu.nextsC))
        flag("union payload mismatch for " + a->expr + ", " + b->expr);
      if (!(minimal_conservative(pc).nextsC == fc.nextsC))
        flag("combination payload mismatch for " + a->expr + ", " + b->expr);
      if (!(minimal_conservative(ps).nextsC == fs.nextsC))
        flag("succession payload mismatch for " + a->expr + ", " + b->expr);
      contained(fu, pu,
                conservative_upper_bound_basis(PredOp::union_op, *a, *b),
                "union of " + a->expr + ", " + b->expr);
      contained(fc, pc,
                conservative_upper_bound_basis(PredOp::combine_op, *a, *b),
                "combination of " + a->expr + ", " + b->expr);
      contained(fs, ps,
                conservative_upper_bound_basis(PredOp::succeed_op, *a, *b),
                "succession of " + a->expr + ", " + b->expr);
    }
  }
  if (!failures.empty()) {
    rep.verdict = "fails";
    rep.witness = failures;
  } else
    rep.verdict = partial ? "partial-budget" : "holds-at-horizon";
  return rep;
}

TheoremReport c09_property_preservation(const SuiteContext& ctx, EventOrder) {
  TheoremReport rep;
  rep.theorem = "c09-property-preservation";
  const auto pool = oblivious_pool(ctx);
  json failures = json::array();
  int applications = 0;

  auto run = [&](auto&& property, const char* name) {
    std::vector<const Predicate*> holders;
    for (const Predicate* p : pool)
      if (property(*p)) holders.push_back(p);
    for (const Predicate* a : holders) {
      ++applications;
      if (!property(repeat_pred(*a)))
        failures.push_back(std::string(name) + " lost by repetition of " +
                           a->expr);
      for (const Predicate* b : holders) {
        applications += 3;
        if (!property(union_pred(*a, *b)))
          failures.push_back(std::string(name) + " lost by union of " +
                             a->expr + ", " + b->expr);
        if (!property(combine_pred(*a, *b)))
          failures.push_back(std::string(name) + " lost by combination of " +
                             a->expr + ", " + b->expr);
        if (!property(succeed_pred(*a, *b)))
          failures.push_back(std::string(name) + " lost by succession of " +
                             a->expr + ", " + b->expr);
      }
    }
  };
  run([](const Predicate& p) { return has_common_round(p); }, "common round");
  run([](const Predicate& p) { return has_common_prefix(p); },
      "common prefix");

  rep.params = {{"n", ctx.cfg.n},
                {"horizon", ctx.cfg.horizon},
                {"applications", applications}};
  if (failures.empty())
    rep.verdict = "holds-at-horizon";
  else {
    rep.verdict = "fails";
    rep.witness = failures;
  }
  return rep;
}

// All heard-of collections whose per-round total deficiency is at most one:
// the product over rounds of (full row | one process misses one sender).
std::vector<Collection> deficiency_bounded_set(int n, int R) {
  std::vector<std::vector<std::vector<Mask>>> row_options(R);
  std::vector<Mask> full_row(n, full_mask(n));
  for (int r = 0; r < R; ++r) {
    row_options[r].push_back(full_row);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        std::vector<Mask> row = full_row;
        row[j] = full_mask(n) & ~(Mask(1) << k);
        row_options[r].push_back(std::move(row));
      }
  }
  std::vector<Collection> out;
  std::vector<std::size_t> odo(R, 0);
  while (true) {
    Collection c(n, R);
    for (int r = 1; r <= R; ++r)
      for (int p = 0; p < n; ++p) c.set(r, p, row_options[r - 1][odo[r - 1]][p]);
    out.push_back(std::move(c));
    int i = R - 1;
    for (; i >= 0; --i) {
      if (++odo[i] < row_options[i].size()) break;
      odo[i] = 0;
    }
    if (i < 0) break;
  }
  sort_dedup(out);
  return out;
}

// The subset of the above that is reachable at the horizon: a process
// deficient at round r < R must hear every other process on time at round
// r+1 (its round change needs their next-round messages before its own).
bool refined_deficiency_condition(const Collection& ho) {
  const Mask full = full_mask(ho.n);
  for (int r = 1; r < ho.horizon; ++r)
    for (int p = 0; p < ho.n; ++p)
      if (ho.at(r, p) != full) {
        const Mask others = full & ~(Mask(1) << p);
        if ((ho.at(r + 1, p) & others) != others) return false;
      }
  return true;
}

TheoremReport c10_floss(const SuiteContext& ctx, EventOrder order) {
  const int n = ctx.cfg.n, R = ctx.cfg.horizon;
  TheoremReport rep;
  rep.theorem = "c10-floss";
  const Strategy floss = f_loss(n);
  json failures = json::array();
  bool partial = false;

  const DeadlockWitness dw = find_deadlock(floss, ctx.lossl1, ctx.cfg.budget);
  if (!dw.exhausted) partial = true;
  if (dw.found) failures.push_back("deadlock: " + dw.description);

  const std::vector<Collection> stated = deficiency_bounded_set(n, R);
  const HOEnumResult got = enumerate_ho_bounded(floss, ctx.lossl1,
                                                ctx.cfg.budget);
  if (!got.exact) partial = true;
  rep.params = {{"n", n},
                {"horizon", R},
                {"stated_size", stated.size()},
                {"enumerated_size", got.collections.size()}};
  if (got.exact && !(got.collections == stated)) {
    json w = diff_witness(got.collections, stated);
    std::vector<Collection> refined;
    for (const Collection& c : stated)
      if (refined_deficiency_condition(c)) refined.push_back(c);
    w["refined_size"] = refined.size();
    w["enumeration_matches_refined"] = refined == got.collections;
    w["refined_rule"] =
        "a process deficient at round r hears all other processes on time "
        "at round r+1";
    failures.push_back(
        json{{"part", "heard-of characterization"}, {"diff", std::move(w)}});
  }

  int shifted_failures = 0;
  json first_shifted;
  for (const Collection& ho : stated) {
    const Execution sh = shifted_canonical_execution(ho, order);
    if (!validate_execution(sh).ok || !is_execution_of_strategy(sh, floss)) {
      if (shifted_failures == 0) first_shifted = collection_sets_json(ho);
      ++shifted_failures;
    }
  }
  rep.params["shifted_checked"] = stated.size();
  if (shifted_failures > 0)
    failures.push_back(json{{"part", "shifted canonical"},
                            {"violations", shifted_failures},
                            {"first", first_shifted}});

  if (!failures.empty()) {
    rep.verdict = "fails";
    rep.witness = failures;
  } else
    rep.verdict = partial ? "partial-budget" : "holds-at-horizon";
  return rep;
}

TheoremReport c11_domination_separations(const SuiteContext& ctx, EventOrder) {
  const int n = ctx.cfg.n, R = ctx.cfg.horizon;
  TheoremReport rep;
  rep.theorem = "c11-domination-separations";
  rep.params = {{"n", n}, {"horizon", R}};
  if (R < 2) {
    rep.verdict = "partial-budget";
    rep.witness = "the conservative/oblivious separation needs horizon >= 2";
    return rep;
  }
  json failures = json::array();
  bool partial = false;

  auto strict_subset = [&](const std::vector<Collection>& small,
                           const HeardOfPredicate& big, json& out) {
    for (const Collection& c : small)
      if (!in_ho_product(c, big.basis)) {
        out["not_contained"] = collection_sets_json(c);
        return false;
      }
    if (small.size() >= big.collections.size()) {
      out["not_strict"] = true;
      return false;
    }
    std::vector<Collection> extra;
    std::set_difference(big.collections.begin(), big.collections.end(),
                        small.begin(), small.end(), std::back_inserter(extra));
    out["sizes"] = {small.size(), big.collections.size()};
    out["separating_collection"] = collection_sets_json(extra.front());
    return true;
  };

  {
    const Predicate& p = ctx.crash1_last;
    const HOEnumResult cons = enumerate_ho_bounded(minimal_conservative(p), p,
                                                   ctx.cfg.budget);
    const HeardOfPredicate obl =
        generate_ho_oblivious(minimal_oblivious(p), p);
    if (!cons.exact)
      partial = true;
    else {
      json w;
      if (strict_subset(cons.collections, obl, w))
        rep.params["conservative_vs_oblivious"] = std::move(w);
      else
        failures.push_back(json{{"part", "crash1@" + std::to_string(R)},
                                {"detail", std::move(w)}});
    }
  }
  {
    const HOEnumResult fl = enumerate_ho_bounded(f_loss(n), ctx.lossl1,
                                                 ctx.cfg.budget);
    const HeardOfPredicate obl =
        generate_ho_oblivious(minimal_oblivious(ctx.lossl1), ctx.lossl1);
    if (!fl.exact)
      partial = true;
    else {
      json w;
      if (strict_subset(fl.collections, obl, w))
        rep.params["floss_vs_oblivious"] = std::move(w);
      else
        failures.push_back(json{{"part", "loss(1)"}, {"detail", std::move(w)}});
    }
  }

  if (!failures.empty()) {
    rep.verdict = "fails";
    rep.witness = failures;
  } else
    rep.verdict = partial ? "partial-budget" : "holds-at-horizon";
  return rep;
}

json report_to_json_zeroed(const TheoremReport& r) {
  json j;
  j["theorem"] = r.theorem;
  j["params"] = r.params;
  j["verdict"] = r.verdict;
  if (!r.witness.is_null()) j["witness"] = r.witness;
  j["elapsed_ms"] = 0;
  return j;
}

std::vector<TheoremReport> run_criteria(const SuiteContext& ctx,
                                        EventOrder order) {
  using Fn = TheoremReport (*)(const SuiteContext&, EventOrder);
  const Fn criteria[] = {
      c01_fnf_characterization, c02_validity_criteria, c03_standard_execution,
      c04_canonical_execution,  c05_oblivious_composition,
      c06_crash_combination_identity, c07_hoprod_lemma,
      c08_conservative_composition, c09_property_preservation, c10_floss,
      c11_domination_separations};
  const char* names[] = {
      "c01-fnf-heardof-characterization", "c02-validity-criteria",
      "c03-standard-execution", "c04-canonical-execution",
      "c05-oblivious-composition", "c06-crash-combination-identity",
      "c07-hoprod-lemma", "c08-conservative-composition-bounds",
      "c09-property-preservation", "c10-floss",
      "c11-domination-separations"};
  std::vector<TheoremReport> out;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    Timer timer;
    TheoremReport rep;
    try {
      rep = criteria[i](ctx, order);
    } catch (const cap_error& e) {
      rep.theorem = names[i];
      rep.verdict = "partial-budget";
      rep.params = {{"n", ctx.cfg.n}, {"horizon", ctx.cfg.horizon}};
      rep.witness = std::string("cap exceeded: ") + e.what();
    } catch (const std::exception& e) {
      rep.theorem = names[i];
      rep.verdict = "fails";
      rep.params = {{"n", ctx.cfg.n}, {"horizon", ctx.cfg.horizon}};
      rep.witness = std::string("check aborted: ") + e.what();
    }
    rep.elapsed_ms = ctx.cfg.timings ? timer.ms() : 0;
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace

TheoremReport check_family_domination(const Predicate& p, StrategyKind family,
                                      const SuiteConfig& cfg) {
  TheoremReport rep;
  rep.theorem = "family-domination";
  rep.params = {{"n", p.n},
                {"horizon", p.horizon},
                {"predicate", p.expr},
                {"family", family == StrategyKind::oblivious ? "oblivious"
                                                             : "conservative"}};
  json failures = json::array();
  bool sampled = false;

  auto ho_of = [&](const Strategy& f) -> std::vector<Collection> {
    if (f.kind == StrategyKind::oblivious && p.has_total() &&
        oblivious_valid_for(f, p))
      return generate_ho_oblivious(f, p).collections;
    return enumerate_ho_bounded(f, p, cfg.budget).collections;
  };

  if (family == StrategyKind::oblivious) {
    const Strategy min = minimal_oblivious(p);
    const std::vector<Collection> min_ho = ho_of(min);
    std::vector<Mask> extras;
    for (Mask m = 0; m <= full_mask(p.n); ++m)
      if (!std::binary_search(min.nexts.begin(), min.nexts.end(), m))
        extras.push_back(m);
    std::vector<std::vector<Mask>> payloads;
    if (extras.size() <= 12) {
      for (std::uint64_t pick = 0; pick < (1ull << extras.size()); ++pick) {
        std::vector<Mask> nexts = min.nexts;
        for (std::size_t i = 0; i < extras.size(); ++i)
          if (pick >> i & 1) nexts.push_back(extras[i]);
        payloads.push_back(std::move(nexts));
      }
    } else {
      sampled = true;
      std::mt19937 rng(cfg.seed);
      for (int s = 0; s < cfg.domination_samples; ++s) {
        std::vector<Mask> nexts = min.nexts;
        for (Mask m : extras)
          if (rng() % 2) nexts.push_back(m);
        payloads.push_back(std::move(nexts));
      }
    }
    rep.params["strategies"] = payloads.size();
    for (auto& nexts : payloads) {
      const Strategy f = make_oblivious(p.n, std::move(nexts));
      const std::vector<Collection> f_ho = ho_of(f);
      if (!std::includes(f_ho.begin(), f_ho.end(), min_ho.begin(),
                         min_ho.end()))
        failures.push_back("a valid oblivious strategy with " +
                           std::to_string(f.nexts.size()) +
                           " nexts does not cover the minimal heard-of set");
    }
  } else if (family == StrategyKind::conservative) {
    const Strategy min = minimal_conservative(p);
    const std::vector<Collection> min_ho =
        enumerate_ho_bounded(min, p, cfg.budget).collections;
    // Universe of conservative states up to the horizon.
    std::vector<ConsState> universe;
    std::vector<Mask> stackp;
    auto gen = [&](auto&& self, int round) -> void {
      if (round > p.horizon) return;
      for (Mask m = 0; m <= full_mask(p.n); ++m) {
        stackp.push_back(m);
        universe.push_back(ConsState{round, stackp});
        self(self, round + 1);
        stackp.pop_back();
      }
    };
    gen(gen, 1);
    std::vector<ConsState> extras;
    for (const ConsState& s : universe)
      if (!std::binary_search(min.nextsC.begin(), min.nextsC.end(), s))
        extras.push_back(s);
    sampled = extras.size() > 6;
    std::mt19937 rng(cfg.seed);
    const int count = sampled ? cfg.domination_samples
                              : (1 << extras.size());
    rep.params["strategies"] = count;
    for (int s = 0; s < count; ++s) {
      std::vector<ConsState> states = min.nextsC;
      for (std::size_t i = 0; i < extras.size(); ++i) {
        const bool take = sampled ? (rng() % 2 == 1) : ((s >> i) & 1);
        if (take) states.push_back(extras[i]);
      }
      const Strategy f = make_conservative(p.n, p.horizon, std::move(states));
      const std::vector<Collection> f_ho =
          enumerate_ho_bounded(f, p, cfg.budget).collections;
      if (!std::includes(f_ho.begin(), f_ho.end(), min_ho.begin(),
                         min_ho.end()))
        failures.push_back(
            "a valid conservative strategy does not cover the minimal "
            "heard-of set");
    }
    // Cross-family information, useful when reading separation reports.
    if (p.has_total()) {
      rep.params["minimal_conservative_ho_size"] = min_ho.size();
      rep.params["minimal_oblivious_ho_size"] =
          generate_ho_oblivious(minimal_oblivious(p), p).collections.size();
    }
  } else {
    throw std::invalid_argument(
        "check_family_domination: family must be oblivious or conservative");
  }

  if (!failures.empty()) {
    rep.verdict = "fails";
    rep.witness = failures;
  } else
    rep.verdict = sampled ? "partial-budget" : "holds-at-horizon";
  if (sampled) rep.params["sampled"] = true;
  return rep;
}

TheoremReport check_global_domination_evidence(const Predicate& p,
                                               const SuiteConfig& cfg) {
  TheoremReport rep;
  rep.theorem = "global-domination-evidence";
  rep.params = {{"n", p.n}, {"horizon", p.horizon}, {"predicate", p.expr}};
  rep.verdict = "holds-at-horizon";
  json w;
  if (has_common_round(p)) {
    w["condition"] = "common-round";
    w["dominating_strategy"] = "minimal-oblivious";
    json basis = json::array();
    for (Mask m : minimal_oblivious(p).nexts) basis.push_back(mask_json(m, p.n));
    w["nexts"] = std::move(basis);
  } else if (has_common_prefix(p)) {
    w["condition"] = "common-prefix";
    w["dominating_strategy"] = "minimal-conservative";
    w["prefix_count"] = minimal_conservative(p).nextsC.size();
  } else {
    w["condition"] = "none";
    w["note"] = "no sufficient condition applies";
    if (p.n >= 2) {
      const Strategy floss = f_loss(p.n);
      const DeadlockWitness dw = find_deadlock(floss, p, cfg.budget);
      json cmp;
      cmp["floss_valid"] = !dw.found && dw.exhausted;
      if (!dw.found && dw.exhausted && p.has_total()) {
        const std::vector<Collection> fl =
            enumerate_ho_bounded(floss, p, cfg.budget).collections;
        const HeardOfPredicate obl =
            generate_ho_oblivious(minimal_oblivious(p), p);
        cmp["floss_ho_size"] = fl.size();
        cmp["minimal_oblivious_ho_size"] = obl.collections.size();
        const bool contained = std::all_of(
            fl.begin(), fl.end(),
            [&](const Collection& c) { return in_ho_product(c, obl.basis); });
        cmp["floss_strictly_below_oblivious"] =
            contained && fl.size() < obl.collections.size();
      }
      w["floss_comparison"] = std::move(cmp);
    }
  }
  rep.witness = std::move(w);
  return rep;
}

std::vector<TheoremReport> run_theorem_suite(const SuiteConfig& cfg) {
  const SuiteContext ctx(cfg);
  std::vector<TheoremReport> reports = run_criteria(ctx, cfg.order);

  // Criterion 12: the whole suite, re-run under the reversed canonical
  // order, must produce byte-identical reports.
  Timer t12;
  const EventOrder flipped = cfg.order == EventOrder::lexicographic
                                 ? EventOrder::reversed
                                 : EventOrder::lexicographic;
  const std::vector<TheoremReport> again = run_criteria(ctx, flipped);
  TheoremReport det;
  det.theorem = "c12-determinism";
  json a = json::array(), b = json::array();
  for (const TheoremReport& r : reports) a.push_back(report_to_json_zeroed(r));
  for (const TheoremReport& r : again) b.push_back(report_to_json_zeroed(r));
  const std::string dump_a = a.dump(), dump_b = b.dump();
  det.params = {{"n", cfg.n},
                {"horizon", cfg.horizon},
                {"bytes", dump_a.size()}};
  if (dump_a == dump_b)
    det.verdict = "holds-at-horizon";
  else {
    det.verdict = "fails";
    for (std::size_t i = 0; i < reports.size() && i < again.size(); ++i)
      if (report_to_json_zeroed(reports[i]) !=
          report_to_json_zeroed(again[i])) {
        det.witness = "first divergence in " + reports[i].theorem;
        break;
      }
  }
  det.elapsed_ms = cfg.timings ? t12.ms() : 0;
  reports.push_back(std::move(det));

  std::sort(reports.begin(), reports.end(),
            [](const TheoremReport& x, const TheoremReport& y) {
              return x.theorem < y.theorem;
            });
  return reports;
}

bool suite_passed(const std::vector<TheoremReport>& reports) {
  return std::none_of(reports.begin(), reports.end(),
                      [](const TheoremReport& r) { return r.failed(); });
}

}  // namespace heardof
