#include "heardof/predicate.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "heardof/parallel.hpp"

namespace heardof {

namespace {

std::uint64_t initial_cap() {
  if (const char* env = std::getenv("HEARDOF_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 10'000'000ull;
}

std::uint64_t& cap_storage() {
  static std::uint64_t cap = initial_cap();
  return cap;
}

void check_cap(std::uint64_t estimate, const char* what) {
  if (estimate > cap_storage())
    throw cap_error(std::string(what) + ": candidate space " +
                        std::to_string(estimate) + " exceeds cap " +
                        std::to_string(cap_storage()),
                    estimate);
}

void sort_dedup(std::vector<Collection>& cs) {
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

void check_pair_shape(const Predicate& a, const Predicate& b,
                      const char* what) {
  if (a.n != b.n || a.horizon != b.horizon)
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                std::to_string(a.n) + "," +
                                std::to_string(a.horizon) + ") vs (" +
                                std::to_string(b.n) + "," +
                                std::to_string(b.horizon) + ")");
}

// Masks over the universe with cardinality >= lo, ascending.
std::vector<Mask> masks_with_min_card(int n, int lo) {
  std::vector<Mask> out;
  for (Mask m = 0; m <= full_mask(n); ++m)
    if (mask_card(m) >= lo) out.push_back(m);
  return out;
}

}  // namespace

std::uint64_t enumeration_cap() { return cap_storage(); }

void set_enumeration_cap(std::uint64_t cap) {
  if (cap == 0) throw std::invalid_argument("cap must be positive");
  cap_storage() = cap;
}

bool Predicate::contains(const Collection& c) const {
  return std::binary_search(collections.begin(), collections.end(), c);
}

Predicate make_predicate(int n, int horizon, std::vector<Collection> members,
                         std::string expr) {
  check_universe(n);
  check_horizon(horizon);
  for (const Collection& c : members)
    if (c.n != n || c.horizon != horizon)
      throw std::invalid_argument("predicate member has mismatched shape");
  sort_dedup(members);
  if (members.empty())
    throw std::invalid_argument("the empty predicate is rejected");
  return Predicate{n, horizon, std::move(members), std::move(expr)};
}

Predicate build_total(int n, int horizon) {
  return make_predicate(n, horizon, {total_collection(n, horizon)}, "total");
}

Predicate build_crash1_at(int n, int horizon, int round) {
  check_universe(n);
  check_horizon(horizon);
  if (round < 1 || round > horizon)
    throw std::out_of_range("crash1@: round " + std::to_string(round) +
                            " outside horizon [1," + std::to_string(horizon) +
                            "]");
  const Mask full = full_mask(n);
  std::vector<Collection> out;
  out.push_back(total_collection(n, horizon));  // the Sigma = Pi case
  for (int crashed = 0; crashed < n; ++crashed) {
    const Mask sigma = full & ~(Mask(1) << crashed);
    // Round-r entries are chosen per process among the supersets of Sigma,
    // i.e. Sigma itself or Pi: the crashed process may have reached some
    // receivers while broadcasting.
    const std::uint64_t combos = 1ull << n;
    check_cap(combos, "crash1@");
    for (std::uint64_t pick = 0; pick < combos; ++pick) {
      Collection c(n, horizon, full);
      for (int p = 0; p < n; ++p)
        c.set(round, p, (pick >> p) & 1 ? full : sigma);
      for (int r = round + 1; r <= horizon; ++r)
        for (int p = 0; p < n; ++p) c.set(r, p, sigma);
      out.push_back(std::move(c));
    }
  }
  sort_dedup(out);
  return Predicate{n, horizon, std::move(out),
                   "crash1@" + std::to_string(round)};
}

namespace {

// Shared clause check for the crash filter. The table must satisfy, for
// every round r < R, c(r+1,p) subset-of K_c(r), and the kernel at R must
// keep cardinality >= n-F so the table extends past the horizon.
bool crash_clauses_hold(const Collection& c, int min_card) {
  for (int r = 1; r < c.horizon; ++r) {
    const Mask k = kernel(c, r);
    for (int p = 0; p < c.n; ++p)
      if (!mask_subset(c.at(r + 1, p), k)) return false;
  }
  return mask_card(kernel(c, c.horizon)) >= min_card;
}

Collection decode_candidate(std::uint64_t index, const std::vector<Mask>& alphabet,
                            int n, int horizon) {
  Collection c(n, horizon);
  for (int i = static_cast<int>(c.sets.size()) - 1; i >= 0; --i) {
    c.sets[i] = alphabet[index % alphabet.size()];
    index /= alphabet.size();
  }
  return c;
}

std::uint64_t crashf_candidates(int n, int horizon, int faults,
                                std::vector<Mask>& alphabet) {
  check_universe(n);
  check_horizon(horizon);
  if (faults < 0 || faults > n)
    throw std::invalid_argument("crash(F): F must be in [0,n]");
  alphabet = masks_with_min_card(n, n - faults);
  std::uint64_t total = 1;
  for (int i = 0; i < n * horizon; ++i) {
    if (total > UINT64_MAX / alphabet.size()) {
      total = UINT64_MAX;  // saturate; the cap check below fires anyway
      break;
    }
    total *= alphabet.size();
  }
  check_cap(total, "crash(F)");
  return total;
}

}  // namespace

Predicate build_crashf_serial(int n, int horizon, int faults) {
  std::vector<Mask> alphabet;
  const std::uint64_t total = crashf_candidates(n, horizon, faults, alphabet);
  std::vector<Collection> out;
  for (std::uint64_t i = 0; i < total; ++i) {
    Collection c = decode_candidate(i, alphabet, n, horizon);
    if (crash_clauses_hold(c, n - faults)) out.push_back(std::move(c));
  }
  sort_dedup(out);
  return Predicate{n, horizon, std::move(out),
                   "crash(" + std::to_string(faults) + ")"};
}

Predicate build_crashf(int n, int horizon, int faults) {
  std::vector<Mask> alphabet;
  const std::uint64_t total = crashf_candidates(n, horizon, faults, alphabet);
  std::vector<Collection> out;
#pragma omp parallel if (parallel_enabled())
  {
    std::vector<Collection> local;
#pragma omp for nowait schedule(static)
    for (long long i = 0; i < static_cast<long long>(total); ++i) {
      Collection c = decode_candidate(static_cast<std::uint64_t>(i), alphabet,
                                      n, horizon);
      if (crash_clauses_hold(c, n - faults)) local.push_back(std::move(c));
    }
#pragma omp critical
    out.insert(out.end(), std::make_move_iterator(local.begin()),
               std::make_move_iterator(local.end()));
  }
  sort_dedup(out);
  return Predicate{n, horizon, std::move(out),
                   "crash(" + std::to_string(faults) + ")"};
}

Predicate build_lossl(int n, int horizon, int losses) {
  check_universe(n);
  check_horizon(horizon);
  if (losses < 0) throw std::invalid_argument("loss(L): L must be >= 0");
  const int slots = n * horizon * n;  // (round, receiver, sender) triples
  std::vector<Collection> out;
  std::vector<int> chosen;
  // Every set of at most L never-delivered messages yields one member.
  auto rec = [&](auto&& self, int from, int remaining) -> void {
    Collection c = total_collection(n, horizon);
    for (int idx : chosen) {
      const int r = idx / (n * n) + 1;
      const int p = (idx / n) % n;
      const int k = idx % n;
      c.set(r, p, c.at(r, p) & ~(Mask(1) << k));
    }
    out.push_back(std::move(c));
    if (remaining == 0) return;
    for (int i = from; i < slots; ++i) {
      chosen.push_back(i);
      self(self, i + 1, remaining - 1);
      chosen.pop_back();
    }
  };
  std::uint64_t estimate = 1, term = 1;
  for (int j = 1; j <= losses && j <= slots; ++j) {
    term = term * static_cast<std::uint64_t>(slots - j + 1) / j;
    estimate += term;
    if (estimate > cap_storage()) break;
  }
  check_cap(estimate, "loss(L)");
  rec(rec, 0, losses);
  sort_dedup(out);
  return Predicate{n, horizon, std::move(out),
                   "loss(" + std::to_string(losses) + ")"};
}

Predicate union_pred(const Predicate& a, const Predicate& b) {
  check_pair_shape(a, b, "union");
  std::vector<Collection> out = a.collections;
  out.insert(out.end(), b.collections.begin(), b.collections.end());
  sort_dedup(out);
  return Predicate{a.n, a.horizon, std::move(out),
                   "(" + a.expr + " | " + b.expr + ")"};
}

Predicate combine_pred(const Predicate& a, const Predicate& b) {
  check_pair_shape(a, b, "combine");
  const std::uint64_t pairs =
      static_cast<std::uint64_t>(a.collections.size()) * b.collections.size();
  check_cap(pairs, "combine");
  std::vector<Collection> out;
  out.reserve(pairs);
#pragma omp parallel if (parallel_enabled())
  {
    std::vector<Collection> local;
#pragma omp for nowait schedule(static)
    for (long long i = 0; i < static_cast<long long>(a.collections.size());
         ++i)
      for (const Collection& cb : b.collections)
        local.push_back(combine_collections(a.collections[i], cb));
#pragma omp critical
    out.insert(out.end(), std::make_move_iterator(local.begin()),
               std::make_move_iterator(local.end()));
  }
  sort_dedup(out);
  return Predicate{a.n, a.horizon, std::move(out),
                   "(" + a.expr + " (*) " + b.expr + ")"};
}

Predicate succeed_pred(const Predicate& a, const Predicate& b) {
  check_pair_shape(a, b, "succeed");
  const std::uint64_t combos = static_cast<std::uint64_t>(a.horizon + 1) *
                               a.collections.size() * b.collections.size();
  check_cap(combos, "succeed");
  std::vector<Collection> out;
  // Cuts beyond the horizon are indistinguishable from cut = R here, so the
  // unbounded cut of the definition is clipped to [0, R].
  for (int cut = 0; cut <= a.horizon; ++cut)
    for (const Collection& ca : a.collections)
      for (const Collection& cb : b.collections)
        out.push_back(concat_collections(ca, cut, cb, a.horizon));
  sort_dedup(out);
  return Predicate{a.n, a.horizon, std::move(out),
                   "(" + a.expr + " ~> " + b.expr + ")"};
}

Predicate repeat_pred(const Predicate& a) {
  // Ordered compositions of R as segment lengths; each segment is a prefix
  // of some member, the last one possibly strict.
  std::vector<std::vector<int>> compositions;
  std::vector<int> cur;
  auto gen = [&](auto&& self, int rest) -> void {
    if (rest == 0) {
      compositions.push_back(cur);
      return;
    }
    for (int len = 1; len <= rest; ++len) {
      cur.push_back(len);
      self(self, rest - len);
      cur.pop_back();
    }
  };
  gen(gen, a.horizon);

  std::uint64_t estimate = 0;
  for (const auto& comp : compositions) {
    std::uint64_t term = 1;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      term *= a.collections.size();
      if (term > cap_storage()) break;
    }
    estimate += term;
    if (estimate > cap_storage()) break;
  }
  check_cap(estimate, "repeat");

  std::vector<Collection> out;
  for (const auto& comp : compositions) {
    std::vector<std::size_t> odo(comp.size(), 0);
    while (true) {
      Collection c(a.n, a.horizon);
      int base = 0;
      for (std::size_t seg = 0; seg < comp.size(); ++seg) {
        const Collection& src = a.collections[odo[seg]];
        for (int r = 1; r <= comp[seg]; ++r)
          for (int p = 0; p < a.n; ++p) c.set(base + r, p, src.at(r, p));
        base += comp[seg];
      }
      out.push_back(std::move(c));
      std::size_t i = 0;
      for (; i < odo.size(); ++i) {
        if (++odo[i] < a.collections.size()) break;
        odo[i] = 0;
      }
      if (i == odo.size()) break;
    }
  }
  sort_dedup(out);
  return Predicate{a.n, a.horizon, std::move(out), "(" + a.expr + ")^w"};
}

std::vector<Mask> delivered_sets(const Predicate& p) {
  std::set<Mask> acc;
  for (const Collection& c : p.collections)
    acc.insert(c.sets.begin(), c.sets.end());
  return std::vector<Mask>(acc.begin(), acc.end());
}

std::vector<std::vector<Mask>> member_prefixes(const Predicate& p, int len) {
  std::set<std::vector<Mask>> acc;
  for (const Collection& c : p.collections)
    for (int proc = 0; proc < p.n; ++proc) {
      std::vector<Mask> prefix(len);
      for (int r = 1; r <= len; ++r) prefix[r - 1] = c.at(r, proc);
      acc.insert(std::move(prefix));
    }
  return std::vector<std::vector<Mask>>(acc.begin(), acc.end());
}

bool is_round_symmetric(const Predicate& p) {
  const std::vector<Mask> all = delivered_sets(p);
  for (int r = 1; r <= p.horizon; ++r)
    for (int proc = 0; proc < p.n; ++proc) {
      std::set<Mask> slot;
      for (const Collection& c : p.collections) slot.insert(c.at(r, proc));
      for (Mask m : all)
        if (!slot.count(m)) return false;
    }
  return true;
}

bool is_prefix_symmetric(const Predicate& p) {
  for (int len = 1; len <= p.horizon; ++len) {
    std::vector<std::set<std::vector<Mask>>> per_proc(p.n);
    for (const Collection& c : p.collections)
      for (int proc = 0; proc < p.n; ++proc) {
        std::vector<Mask> prefix(len);
        for (int r = 1; r <= len; ++r) prefix[r - 1] = c.at(r, proc);
        per_proc[proc].insert(std::move(prefix));
      }
    for (int proc = 1; proc < p.n; ++proc)
      if (per_proc[proc] != per_proc[0]) return false;
  }
  return true;
}

bool has_common_round(const Predicate& p) {
  if (!p.has_total()) return false;
  const Mask full = full_mask(p.n);
  // (r', D) pairs a member can stage: all-Pi rounds before r', constant D
  // across processes at r'.
  std::set<std::pair<int, Mask>> staged;
  for (const Collection& c : p.collections) {
    for (int r = 1; r <= p.horizon; ++r) {
      bool constant = true;
      const Mask d = c.at(r, 0);
      for (int proc = 1; proc < p.n; ++proc)
        if (c.at(r, proc) != d) constant = false;
      if (constant) staged.insert({r, d});
      bool all_pi = true;
      for (int proc = 0; proc < p.n; ++proc)
        if (c.at(r, proc) != full) all_pi = false;
      if (!all_pi) break;  // later rounds no longer have an all-Pi prefix
    }
  }
  for (Mask d : delivered_sets(p))
    for (int target = 1; target <= p.horizon; ++target)
      if (!staged.count({target, d})) return false;
  return true;
}

bool has_common_prefix(const Predicate& p) {
  // Uniform prefixes: all processes share the same rows up to some length.
  std::set<std::vector<Mask>> uniform;
  for (const Collection& c : p.collections)
    for (int len = 1; len <= p.horizon; ++len) {
      bool ok = true;
      std::vector<Mask> rows(len);
      for (int r = 1; r <= len && ok; ++r) {
        rows[r - 1] = c.at(r, 0);
        for (int proc = 1; proc < p.n; ++proc)
          if (c.at(r, proc) != rows[r - 1]) ok = false;
      }
      if (!ok) break;
      uniform.insert(std::move(rows));
    }
  for (int len = 1; len <= p.horizon; ++len)
    for (const auto& prefix : member_prefixes(p, len))
      if (!uniform.count(prefix)) return false;
  return true;
}

}  // namespace heardof
