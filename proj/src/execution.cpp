#include "heardof/execution.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <set>
#include <unordered_set>

#include "heardof/parallel.hpp"

namespace heardof {

namespace {

void order_delivers(std::vector<Event>& dels, EventOrder order) {
  std::sort(dels.begin(), dels.end(), [](const Event& a, const Event& b) {
    return std::array<int, 3>{a.round, a.sender, a.process} <
           std::array<int, 3>{b.round, b.sender, b.process};
  });
  if (order == EventOrder::reversed) std::reverse(dels.begin(), dels.end());
}

std::vector<Event> ordered_nexts(std::vector<int> procs, EventOrder order) {
  std::sort(procs.begin(), procs.end());
  if (order == EventOrder::reversed) std::reverse(procs.begin(), procs.end());
  std::vector<Event> out;
  out.reserve(procs.size());
  for (int p : procs) out.push_back(Event::make_next(p));
  return out;
}

// Message bit layout used by the engines, per receiver: bit (r-1)*n + k is
// the message from k tagged with round r.
using MsgBits = std::uint32_t;

int msg_bit(int round, int sender, int n) { return (round - 1) * n + sender; }

Mask round_part(MsgBits bits, int round, int n) {
  return static_cast<Mask>((bits >> ((round - 1) * n)) & full_mask(n));
}

// Packed membership lookups; one instance per (strategy, horizon) pair.
struct MemberIndex {
  const Strategy* f;
  int n;
  int horizon;
  std::vector<std::uint64_t> obliv_bits;     // bitset over 2^n
  std::unordered_set<std::uint64_t> packed;  // conservative / explicit

  MemberIndex(const Strategy& strat, int horizon_)
      : f(&strat), n(strat.n), horizon(horizon_) {
    switch (f->kind) {
      case StrategyKind::oblivious:
        obliv_bits.assign(((std::size_t(1) << n) + 63) / 64, 0);
        for (Mask m : f->nexts) obliv_bits[m >> 6] |= 1ull << (m & 63);
        break;
      case StrategyKind::conservative:
        for (const ConsState& s : f->nextsC) {
          std::uint64_t bits = 0;
          for (int r = s.round; r >= 1; --r)
            bits = (bits << n) | s.prefix[r - 1];
          packed.insert((bits << 4) | static_cast<unsigned>(s.round));
        }
        break;
      case StrategyKind::explicit_set:
        for (const BoundedState& s : f->states) {
          std::uint64_t bits = 0;
          for (int r = f->horizon + 1; r >= 1; --r)
            bits = (bits << n) | s.by_round[r - 1];
          packed.insert((bits << 4) | static_cast<unsigned>(s.round));
        }
        break;
      case StrategyKind::future_one_loss:
        break;
    }
  }

  bool contains(int round, MsgBits bits) const {
    switch (f->kind) {
      case StrategyKind::oblivious: {
        const Mask cur = round_part(bits, round, n);
        return (obliv_bits[cur >> 6] >> (cur & 63)) & 1;
      }
      case StrategyKind::conservative: {
        if (round > horizon) return false;
        const std::uint64_t prefix =
            bits & ((std::uint64_t(1) << (round * n)) - 1);
        return packed.count((prefix << 4) | static_cast<unsigned>(round)) > 0;
      }
      case StrategyKind::future_one_loss: {
        const int cur = mask_card(round_part(bits, round, n));
        if (cur == n) return true;
        return cur == n - 1 &&
               mask_card(round_part(bits, round + 1, n)) == n - 1;
      }
      case StrategyKind::explicit_set: {
        if (round > f->horizon) return false;
        const std::uint64_t window =
            bits & ((std::uint64_t(1) << ((f->horizon + 1) * n)) - 1);
        if (window != bits) return false;
        return packed.count((window << 4) | static_cast<unsigned>(round)) > 0;
      }
    }
    return false;
  }
};

}  // namespace

CheckResult validate_execution(const Execution& t) {
  std::vector<int> nexts(t.n, 0);
  std::set<std::array<int, 3>> seen;
  bool stopped = false;
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const Event& e = t.events[i];
    if (stopped && e.type != Event::Type::stop)
      return {false, i, "event after stop"};
    switch (e.type) {
      case Event::Type::deliver:
        if (e.round < 1) return {false, i, "delivery with round < 1"};
        if (nexts[e.sender] < e.round - 1)
          return {false, i,
                  "delivery of round " + std::to_string(e.round) + " from " +
                      process_name(e.sender) + " before it was sent"};
        if (!seen.insert({e.round, e.sender, e.process}).second)
          return {false, i, "duplicate delivery"};
        break;
      case Event::Type::next:
        ++nexts[e.process];
        break;
      case Event::Type::stop:
        stopped = true;
        break;
    }
  }
  return {};
}

LocalState local_state(const Execution& t, int process, std::size_t upto) {
  if (upto > t.events.size())
    throw std::out_of_range("local_state: index beyond trace end");
  int round = 1;
  std::vector<Message> mes;
  for (std::size_t i = 0; i < upto; ++i) {
    const Event& e = t.events[i];
    if (e.type == Event::Type::next && e.process == process) ++round;
    if (e.type == Event::Type::deliver && e.process == process)
      mes.push_back(Message{e.round, e.sender});
  }
  return LocalState(round, std::move(mes));
}

bool is_execution_of_collection(const Execution& t, const Collection& c) {
  std::vector<int> nexts(t.n, 0);
  std::set<std::array<int, 3>> delivered;
  for (const Event& e : t.events) {
    if (e.type == Event::Type::next) ++nexts[e.process];
    if (e.type != Event::Type::deliver) continue;
    if (e.round > c.horizon + 1) return false;
    if (e.round <= c.horizon &&
        !(c.at(e.round, e.process) & (Mask(1) << e.sender)))
      return false;  // a delivery the collection does not mandate
    delivered.insert({e.round, e.sender, e.process});
  }
  for (int r = 1; r <= c.horizon; ++r)
    for (int k = 0; k < t.n; ++k) {
      if (nexts[k] < r - 1) continue;  // never sent
      for (int j = 0; j < t.n; ++j)
        if ((c.at(r, j) & (Mask(1) << k)) && !delivered.count({r, k, j}))
          return false;  // mandated but missing
    }
  return true;
}

CheckResult check_execution_of_strategy(const Execution& t,
                                        const Strategy& f) {
  int max_round = t.horizon + 1;
  for (const Event& e : t.events)
    if (e.type == Event::Type::deliver)
      max_round = std::max(max_round, e.round);
  std::vector<std::vector<Mask>> recv(t.n, std::vector<Mask>(max_round, 0));
  std::vector<int> rounds(t.n, 1);
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const Event& e = t.events[i];
    if (e.type == Event::Type::deliver) {
      recv[e.process][e.round - 1] |= Mask(1) << e.sender;
    } else if (e.type == Event::Type::next) {
      const int p = e.process;
      if (!f.contains_rounds(rounds[p], recv[p].data(), max_round))
        return {false, i,
                process_name(p) +
                    " advanced from a state outside the strategy"};
      ++rounds[p];
    }
  }
  for (int p = 0; p < t.n; ++p) {
    if (rounds[p] - 1 >= t.horizon) continue;
    if (f.contains_rounds(rounds[p], recv[p].data(), max_round))
      return {false, t.events.size(),
              "fairness violation: " + process_name(p) +
                  " ends enabled after " + std::to_string(rounds[p] - 1) +
                  " of " + std::to_string(t.horizon) + " rounds"};
  }
  return {};
}

bool is_execution_of_strategy(const Execution& t, const Strategy& f) {
  return check_execution_of_strategy(t, f).ok;
}

Execution standard_execution(const Strategy& f, const Collection& c,
                             EventOrder order) {
  const int n = c.n, R = c.horizon;
  Execution t{n, R, {}};
  std::vector<std::vector<Mask>> recv(n, std::vector<Mask>(R + 1, 0));
  std::vector<int> done(n, 0);  // completed rounds per process

  auto broadcast = [&](const std::vector<int>& sender_round) {
    std::vector<Event> dels;
    for (int k = 0; k < n; ++k) {
      const int r = sender_round[k];
      if (r < 1 || r > R) continue;
      for (int j = 0; j < n; ++j)
        if (c.at(r, j) & (Mask(1) << k))
          dels.push_back(Event::make_deliver(r, k, j));
    }
    order_delivers(dels, order);
    for (const Event& e : dels) {
      recv[e.process][e.round - 1] |= Mask(1) << e.sender;
      t.events.push_back(e);
    }
  };

  broadcast(std::vector<int>(n, 1));  // everyone's round-1 messages

  while (true) {
    std::vector<int> movers;
    bool unfinished = false;
    for (int p = 0; p < n; ++p) {
      if (done[p] >= R) continue;
      unfinished = true;
      if (f.contains_rounds(done[p] + 1, recv[p].data(), R + 1))
        movers.push_back(p);
    }
    if (movers.empty()) {
      if (unfinished) t.events.push_back(Event::make_stop());
      break;
    }
    for (const Event& e : ordered_nexts(movers, order)) {
      t.events.push_back(e);
      ++done[e.process];
    }
    std::vector<int> sender_round(n, 0);
    for (int p : movers) sender_round[p] = done[p] + 1;  // round just entered
    broadcast(sender_round);
  }
  return t;
}

Execution canonical_execution(const Collection& ho, EventOrder order) {
  const int n = ho.n, R = ho.horizon;
  Execution t{n, R, {}};
  std::vector<int> all(n);
  for (int p = 0; p < n; ++p) all[p] = p;
  for (int r = 1; r <= R; ++r) {
    std::vector<Event> dels;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (ho.at(r, j) & (Mask(1) << k))
          dels.push_back(Event::make_deliver(r, k, j));
        if (r > 1 && !(ho.at(r - 1, j) & (Mask(1) << k)))
          dels.push_back(Event::make_deliver(r - 1, k, j));
      }
    order_delivers(dels, order);
    t.events.insert(t.events.end(), dels.begin(), dels.end());
    for (const Event& e : ordered_nexts(all, order)) t.events.push_back(e);
  }
  // Leftovers of the last round: the untruncated construction delivers them
  // one phase later, which at the horizon becomes a trailing block.
  std::vector<Event> tail;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (!(ho.at(R, j) & (Mask(1) << k)))
        tail.push_back(Event::make_deliver(R, k, j));
  order_delivers(tail, order);
  t.events.insert(t.events.end(), tail.begin(), tail.end());
  return t;
}

namespace {

struct Deficiency {
  bool present = false;
  int process = 0;
  int missing = 0;
};

std::vector<Deficiency> deficiency_table(const Collection& ho) {
  std::vector<Deficiency> def(ho.horizon + 1);
  for (int r = 1; r <= ho.horizon; ++r) {
    int total = 0;
    for (int p = 0; p < ho.n; ++p) {
      const Mask miss = full_mask(ho.n) & ~ho.at(r, p);
      if (miss == 0) continue;
      total += mask_card(miss);
      def[r] = {true, p, __builtin_ctz(miss)};
    }
    if (total > 1)
      throw std::domain_error(
          "shifted canonical execution requires per-round total deficiency "
          "<= 1, round " +
          std::to_string(r) + " has " + std::to_string(total));
  }
  return def;
}

}  // namespace

Execution shifted_canonical_execution(const Collection& ho,
                                      EventOrder order) {
  const int n = ho.n, R = ho.horizon;
  const auto def = deficiency_table(ho);
  Execution t{n, R, {}};

  for (int r = 1; r <= R + 1; ++r) {
    // The previous round's deficient process does its postponed next here,
    // after the deliveries of this round addressed to it.
    if (r > 1 && def[r - 1].present) {
      const int j = def[r - 1].process;
      std::vector<Event> feed;
      if (r <= R) {
        for (int k = 0; k < n; ++k)
          if (k != j && (ho.at(r, j) & (Mask(1) << k)))
            feed.push_back(Event::make_deliver(r, k, j));
      } else {
        for (int k = 0; k < n; ++k)  // beyond the horizon: unconstrained
          if (k != j) feed.push_back(Event::make_deliver(R + 1, k, j));
      }
      order_delivers(feed, order);
      t.events.insert(t.events.end(), feed.begin(), feed.end());
      t.events.push_back(Event::make_next(j));
      t.events.push_back(Event::make_deliver(r - 1, def[r - 1].missing, j));
    }
    if (r > R) break;

    std::vector<Event> dels;  // remaining on-time deliveries of round r
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (!(ho.at(r, j) & (Mask(1) << k))) continue;
        if (r > 1 && def[r - 1].present && j == def[r - 1].process && k != j)
          continue;  // already delivered as the feed above
        dels.push_back(Event::make_deliver(r, k, j));
      }
    order_delivers(dels, order);
    t.events.insert(t.events.end(), dels.begin(), dels.end());

    std::vector<int> movers;
    for (int p = 0; p < n; ++p)
      if (!(def[r].present && def[r].process == p)) movers.push_back(p);
    for (const Event& e : ordered_nexts(movers, order)) t.events.push_back(e);
  }
  return t;
}

Collection extract_heardof(const Execution& t) {
  std::vector<int> total(t.n, 0);
  for (const Event& e : t.events)
    if (e.type == Event::Type::next) ++total[e.process];
  for (int p = 0; p < t.n; ++p)
    if (total[p] < t.horizon)
      throw std::runtime_error(
          "incomplete trace: " + process_name(p) + " completed " +
          std::to_string(total[p]) + " of " + std::to_string(t.horizon) +
          " rounds");
  Collection ho(t.n, t.horizon);
  std::vector<std::vector<Mask>> recv(t.n,
                                      std::vector<Mask>(t.horizon + 2, 0));
  std::vector<int> done(t.n, 0);
  for (const Event& e : t.events) {
    if (e.type == Event::Type::deliver) {
      if (e.round <= t.horizon + 1)
        recv[e.process][e.round - 1] |= Mask(1) << e.sender;
    } else if (e.type == Event::Type::next) {
      const int r = done[e.process] + 1;
      if (r <= t.horizon) ho.set(r, e.process, recv[e.process][r - 1]);
      ++done[e.process];
    }
  }
  return ho;
}

// ---------------------------------------------------------------------------
// Bounded exhaustive enumeration.
//
// A trace is abstracted as (a) a total order sigma over the n*R next events
// and (b), per process, a monotone chain S_1 <= ... <= S_R of delivery
// windows, S_r being everything delivered to the process before its r-th
// next. Deliveries commute with every event that does not read the
// receiver's state, so each trace normalizes into such windows; and given
// sigma, the chains of distinct processes are independent, so their
// heard-of rows combine as a Cartesian product. Chains are further cut to
// the message rounds the strategy family can observe.

namespace {

constexpr int kMaxRounds = 8;
using AllowedArray = std::array<MsgBits, kMaxRounds>;

std::uint64_t multiset_perm_count(int n, int rounds) {
  // (n*rounds)! / (rounds!)^n, saturating
  std::uint64_t count = 1;
  int placed = 0;
  for (int p = 0; p < n; ++p)
    for (int r = 1; r <= rounds; ++r) {
      ++placed;
      if (count > (1ull << 56)) return count;
      count = count * placed / r;  // binomial growth, exact at each step
    }
  return count;
}

struct SigmaSpace {
  std::vector<std::vector<std::int8_t>> perms;
  bool complete = true;

  SigmaSpace(int n, int rounds, std::uint64_t limit) {
    if (multiset_perm_count(n, rounds) > limit) complete = false;
    std::vector<int> remaining(n, rounds);
    std::vector<std::int8_t> cur;
    build(cur, remaining, n * rounds, limit);
  }

 private:
  void build(std::vector<std::int8_t>& cur, std::vector<int>& remaining,
             int total, std::uint64_t limit) {
    if (perms.size() >= limit) return;
    if (static_cast<int>(cur.size()) == total) {
      perms.push_back(cur);
      return;
    }
    for (int p = 0; p < static_cast<int>(remaining.size()); ++p) {
      if (remaining[p] == 0) continue;
      --remaining[p];
      cur.push_back(static_cast<std::int8_t>(p));
      build(cur, remaining, total, limit);
      cur.pop_back();
      ++remaining[p];
    }
  }
};

// Dense bitset over the per-process heard-of row space (2^(n*R) rows).
struct RowSet {
  std::vector<std::uint64_t> words;
  std::vector<std::uint32_t> flat;  // set rows, ascending

  explicit RowSet(std::size_t rows) : words((rows + 63) / 64, 0) {}

  void add(std::uint32_t row) { words[row >> 6] |= 1ull << (row & 63); }

  void flatten() {
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      while (bits) {
        flat.push_back(static_cast<std::uint32_t>(w * 64 +
                                                  __builtin_ctzll(bits)));
        bits &= bits - 1;
      }
    }
  }
};

struct ChainScan {
  int n = 0;
  int R = 0;
  const MemberIndex* idx = nullptr;
  std::uint64_t work = 0;

  void run(const AllowedArray& allowed, int pos, MsgBits state,
           std::uint32_t row, RowSet& rows) {
    const MsgBits fresh = allowed[pos - 1] & ~state;
    MsgBits delta = fresh;
    while (true) {  // every submask of fresh, the empty one included
      ++work;
      const MsgBits next_state = state | delta;
      if (idx->contains(pos, next_state)) {
        const std::uint32_t next_row =
            row |
            (std::uint32_t(round_part(next_state, pos, n)) << ((pos - 1) * n));
        if (pos == R)
          rows.add(next_row);
        else
          run(allowed, pos + 1, next_state, next_row, rows);
      }
      if (delta == 0) break;
      delta = (delta - 1) & fresh;
    }
  }
};

}  // namespace

HOEnumResult enumerate_ho_bounded(const Strategy& f, const Predicate& del,
                                  std::uint64_t budget) {
  const int n = del.n, R = del.horizon;
  if (f.n != n)
    throw std::invalid_argument("enumerate_ho_bounded: universe mismatch");
  const bool lookahead = f.looks_ahead();
  const int msg_rounds = R + (lookahead ? 1 : 0);
  if (!collection_packable(n, R) || n * msg_rounds > 28 || n * R > 20 ||
      msg_rounds > kMaxRounds)
    throw cap_error("enumerate_ho_bounded: instance too large",
                    static_cast<std::uint64_t>(n) * n * R);

  HOEnumResult result;
  const SigmaSpace sigma(n, R, std::min<std::uint64_t>(budget, 2'000'000));
  if (!sigma.complete) result.exact = false;

  // Collapse the next orders into availability classes: which messages a
  // process may have received by each of its nexts depends on sigma only
  // through sender-progress comparisons, and not on the collection. The
  // per-family observation window is folded in here as well.
  std::set<std::vector<MsgBits>> class_set;
  {
    std::vector<std::array<int, kMaxRounds>> pos(n);
    std::vector<MsgBits> avail(n * R);
    for (const auto& perm : sigma.perms) {
      std::vector<int> cnt(n, 0);
      for (std::size_t i = 0; i < perm.size(); ++i)
        pos[perm[i]][cnt[perm[i]]++] = static_cast<int>(i);
      for (int j = 0; j < n; ++j)
        for (int step = 1; step <= R; ++step) {
          int from = 1, upto = msg_rounds;
          switch (f.kind) {
            case StrategyKind::oblivious: from = upto = step; break;
            case StrategyKind::conservative: upto = step; break;
            case StrategyKind::future_one_loss:
              from = step;
              upto = std::min(msg_rounds, step + 1);
              break;
            case StrategyKind::explicit_set: break;
          }
          MsgBits a = 0;
          for (int r2 = from; r2 <= upto; ++r2)
            for (int k = 0; k < n; ++k)
              if (r2 == 1 || pos[k][r2 - 2] < pos[j][step - 1])
                a |= MsgBits(1) << msg_bit(r2, k, n);
          avail[j * R + step - 1] = a;
        }
      class_set.insert(avail);
    }
  }
  const std::vector<std::vector<MsgBits>> classes(class_set.begin(),
                                                  class_set.end());

  // Phase 1: per collection, intersect each class with the mandated
  // messages and collect the distinct per-process allowed tuples. The
  // per-collection quota makes the cutoff independent of thread schedule.
  using TupleKey = std::array<MsgBits, 24>;  // n*R <= 20 allowed masks
  std::set<TupleKey> tuples;
  std::atomic<std::uint64_t> work{0};
  std::atomic<bool> truncated{false};
  const std::uint64_t quota1 = std::max<std::uint64_t>(
      budget / 2 / std::max<std::size_t>(del.collections.size(), 1), 1024);

  #pragma omp parallel if (parallel_enabled())
  {
    std::set<TupleKey> local_tuples;
    std::uint64_t local_work = 0;

    #pragma omp for nowait schedule(dynamic)
    for (long long ci = 0; ci < static_cast<long long>(del.collections.size());
         ++ci) {
      const Collection& c = del.collections[ci];
      std::vector<MsgBits> mandated(n, 0);
      for (int j = 0; j < n; ++j) {
        for (int r = 1; r <= R; ++r)
          mandated[j] |= MsgBits(c.at(r, j)) << ((r - 1) * n);
        if (lookahead) mandated[j] |= MsgBits(full_mask(n)) << (R * n);
      }
      std::uint64_t cwork = 0;
      for (const auto& cls : classes) {
        cwork += n * R;
        if (cwork > quota1) {
          truncated.store(true);
          break;
        }
        TupleKey key{};
        for (int j = 0; j < n; ++j)
          for (int step = 0; step < R; ++step)
            key[j * R + step] = cls[j * R + step] & mandated[j];
        local_tuples.insert(key);
      }
      local_work += cwork;
    }
    work += local_work;
    #pragma omp critical
    tuples.insert(local_tuples.begin(), local_tuples.end());
  }

  // Phase 2a: resolve every distinct tuple to its per-process row sets and
  // the exact size of its product. Chain scans are cached by allowed mask.
  const std::vector<TupleKey> tuple_list(tuples.begin(), tuples.end());
  const std::size_t row_space = std::size_t(1) << (n * R);
  const MemberIndex idx(f, R);
  std::map<AllowedArray, RowSet> chain_cache;
  std::vector<std::array<const RowSet*, 12>> tuple_rows(tuple_list.size());
  std::vector<std::uint64_t> tuple_cost(tuple_list.size(), 0);
  {
    std::uint64_t scan_work = 0;
    for (std::size_t ti = 0; ti < tuple_list.size(); ++ti) {
      std::uint64_t cost = 1;
      for (int j = 0; j < n; ++j) {
        AllowedArray allowed;
        allowed.fill(0);
        for (int step = 0; step < R; ++step)
          allowed[step] = tuple_list[ti][j * R + step];
        auto it = chain_cache.find(allowed);
        if (it == chain_cache.end()) {
          RowSet rs(row_space);
          ChainScan scan{n, R, &idx};
          scan.run(allowed, 1, 0, 0, rs);
          rs.flatten();
          scan_work += scan.work;
          it = chain_cache.emplace(allowed, std::move(rs)).first;
        }
        tuple_rows[ti][j] = &it->second;
        cost *= it->second.flat.size();
      }
      tuple_cost[ti] = cost;
    }
    work += scan_work;
  }

  // Deterministic cutoff: spend the remaining budget on whole tuples in
  // canonical order; whatever does not fit marks the result partial.
  std::vector<char> selected(tuple_list.size(), 0);
  {
    const std::uint64_t pool = budget / 2;
    std::uint64_t acc = 0;
    for (std::size_t ti = 0; ti < tuple_list.size(); ++ti) {
      if (tuple_cost[ti] == 0) continue;
      if (acc + tuple_cost[ti] <= pool) {
        selected[ti] = 1;
        acc += tuple_cost[ti];
      } else {
        truncated.store(true);
      }
    }
  }

  // Phase 2b: blast the selected products. Keys land in a dense bitset
  // when the key space is small enough, otherwise in an ordered set.
  const int key_bits = n * n * R;
  const bool dense = key_bits <= 27;
  std::vector<std::uint64_t> key_words(
      dense ? std::size_t(1) << std::max(0, key_bits - 6) : 0);
  std::set<std::uint64_t> key_set;
  #pragma omp parallel if (parallel_enabled())
  {
    std::vector<std::uint64_t> local_words(key_words.size(), 0);
    std::set<std::uint64_t> local_set;
    std::uint64_t local_work = 0;

    #pragma omp for nowait schedule(dynamic)
    for (long long ti = 0; ti < static_cast<long long>(tuple_list.size());
         ++ti) {
      if (!selected[ti]) continue;
      const auto& rows = tuple_rows[ti];
      std::vector<std::size_t> odo(n, 0);
      while (true) {
        std::uint64_t key = 0;
        for (int r = 1; r <= R; ++r)
          for (int p = 0; p < n; ++p)
            key = (key << n) |
                  ((rows[p]->flat[odo[p]] >> ((r - 1) * n)) & full_mask(n));
        if (dense)
          local_words[key >> 6] |= 1ull << (key & 63);
        else
          local_set.insert(key);
        ++local_work;
        int i = n - 1;
        for (; i >= 0; --i) {
          if (++odo[i] < rows[i]->flat.size()) break;
          odo[i] = 0;
        }
        if (i < 0) break;
      }
    }
    work += local_work;
    #pragma omp critical
    {
      for (std::size_t w = 0; w < key_words.size(); ++w)
        key_words[w] |= local_words[w];
      key_set.insert(local_set.begin(), local_set.end());
    }
  }

  result.work = work.load();
  if (truncated.load()) result.exact = false;
  std::uint64_t distinct = key_set.size();
  if (dense) {
    distinct = 0;
    for (std::uint64_t w : key_words) distinct += __builtin_popcountll(w);
  }
  if (distinct > enumeration_cap())
    throw cap_error("enumerate_ho_bounded: result exceeds cap", distinct);
  result.collections.reserve(distinct);
  if (dense) {
    for (std::size_t w = 0; w < key_words.size(); ++w) {
      std::uint64_t bits = key_words[w];
      while (bits) {
        const int b = __builtin_ctzll(bits);
        bits &= bits - 1;
        result.collections.push_back(
            unpack_collection(w * 64 + static_cast<std::uint64_t>(b), n, R));
      }
    }
  } else {
    for (std::uint64_t key : key_set)
      result.collections.push_back(unpack_collection(key, n, R));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Single-event reference enumerator and the deadlock search. Both walk the
// raw transition system, one delivery or one round change at a time.

namespace {

// Exact bit-packing of a walk state into 128 bits.
struct PackedState {
  std::uint64_t hi = 0, lo = 0;
  friend auto operator<=>(const PackedState&, const PackedState&) = default;

  void append(std::uint64_t value, int bits) {
    hi = (hi << bits) | (lo >> (64 - bits));
    lo = (lo << bits) | value;
  }
};

struct WalkContext {
  int n = 0, R = 0;
  bool lookahead = false;
  const MemberIndex* idx = nullptr;
  std::vector<MsgBits> mandated;
  std::uint64_t budget = 0;
  std::uint64_t work = 0;
  bool exhausted = true;
};

int walk_state_bits(const WalkContext& ctx, bool with_snaps) {
  const int msg_rounds = ctx.R + (ctx.lookahead ? 1 : 0);
  return ctx.n * (4 + ctx.n * msg_rounds) +
         (with_snaps ? ctx.n * ctx.n * ctx.R : 0);
}

PackedState pack_walk_state(const WalkContext& ctx,
                            const std::vector<int>& done,
                            const std::vector<MsgBits>& recv,
                            const std::vector<std::uint32_t>* snaps) {
  const int msg_rounds = ctx.R + (ctx.lookahead ? 1 : 0);
  PackedState s;
  for (int p = 0; p < ctx.n; ++p) {
    s.append(static_cast<std::uint64_t>(done[p]), 4);
    s.append(recv[p], ctx.n * msg_rounds);
    if (snaps) s.append((*snaps)[p], ctx.n * ctx.R);
  }
  return s;
}

MsgBits available_bits(const WalkContext& ctx, const std::vector<int>& done,
                       int receiver) {
  MsgBits out = 0;
  const int msg_rounds = ctx.R + (ctx.lookahead ? 1 : 0);
  for (int r = 1; r <= msg_rounds; ++r)
    for (int k = 0; k < ctx.n; ++k) {
      const int bit = msg_bit(r, k, ctx.n);
      if ((ctx.mandated[receiver] >> bit & 1) && done[k] >= r - 1)
        out |= MsgBits(1) << bit;
    }
  return out;
}

void naive_walk(WalkContext& ctx, std::vector<int>& done,
                std::vector<MsgBits>& recv, std::vector<std::uint32_t>& snaps,
                std::set<PackedState>& visited,
                std::set<std::uint64_t>& sink) {
  if (++ctx.work > ctx.budget) {
    ctx.exhausted = false;
    return;
  }
  if (!visited.insert(pack_walk_state(ctx, done, recv, &snaps)).second)
    return;
  bool all_done = true;
  for (int p = 0; p < ctx.n; ++p)
    if (done[p] < ctx.R) all_done = false;
  if (all_done) {
    std::uint64_t key = 0;
    for (int r = 1; r <= ctx.R; ++r)
      for (int p = 0; p < ctx.n; ++p)
        key = (key << ctx.n) |
              ((snaps[p] >> ((r - 1) * ctx.n)) & full_mask(ctx.n));
    sink.insert(key);
    return;
  }
  for (int p = 0; p < ctx.n; ++p) {
    if (done[p] >= ctx.R) continue;
    MsgBits avail = available_bits(ctx, done, p) & ~recv[p];
    while (avail) {
      const int bit = __builtin_ctz(avail);
      avail &= avail - 1;
      recv[p] |= MsgBits(1) << bit;
      naive_walk(ctx, done, recv, snaps, visited, sink);
      recv[p] &= ~(MsgBits(1) << bit);
    }
    if (ctx.idx->contains(done[p] + 1, recv[p])) {
      const int r = done[p] + 1;
      const std::uint32_t saved = snaps[p];
      snaps[p] |= std::uint32_t(round_part(recv[p], r, ctx.n))
                  << ((r - 1) * ctx.n);
      ++done[p];
      naive_walk(ctx, done, recv, snaps, visited, sink);
      --done[p];
      snaps[p] = saved;
    }
  }
}

bool deadlock_walk(WalkContext& ctx, std::vector<int>& done,
                   std::vector<MsgBits>& recv,
                   std::set<PackedState>& visited, int& blocked) {
  if (++ctx.work > ctx.budget) {
    ctx.exhausted = false;
    return false;
  }
  if (!visited.insert(pack_walk_state(ctx, done, recv, nullptr)).second)
    return false;
  bool any_move = false;
  bool any_unfinished = false;
  for (int p = 0; p < ctx.n; ++p) {
    if (done[p] >= ctx.R) continue;
    any_unfinished = true;
    MsgBits avail = available_bits(ctx, done, p) & ~recv[p];
    while (avail) {
      const int bit = __builtin_ctz(avail);
      avail &= avail - 1;
      any_move = true;
      recv[p] |= MsgBits(1) << bit;
      const bool hit = deadlock_walk(ctx, done, recv, visited, blocked);
      recv[p] &= ~(MsgBits(1) << bit);
      if (hit) return true;
    }
    if (ctx.idx->contains(done[p] + 1, recv[p])) {
      any_move = true;
      ++done[p];
      const bool hit = deadlock_walk(ctx, done, recv, visited, blocked);
      --done[p];
      if (hit) return true;
    }
  }
  if (any_unfinished && !any_move) {
    for (int p = 0; p < ctx.n; ++p)
      if (done[p] < ctx.R) blocked = p;
    return true;
  }
  return false;
}

WalkContext make_walk_context(const Strategy& f, const Predicate& del,
                              const Collection& c, const MemberIndex* idx,
                              std::uint64_t budget) {
  WalkContext ctx;
  ctx.n = del.n;
  ctx.R = del.horizon;
  ctx.lookahead = f.looks_ahead();
  ctx.idx = idx;
  ctx.budget = budget;
  ctx.mandated.assign(ctx.n, 0);
  for (int j = 0; j < ctx.n; ++j) {
    for (int r = 1; r <= ctx.R; ++r)
      ctx.mandated[j] |= MsgBits(c.at(r, j)) << ((r - 1) * ctx.n);
    if (ctx.lookahead)
      ctx.mandated[j] |= MsgBits(full_mask(ctx.n)) << (ctx.R * ctx.n);
  }
  return ctx;
}

void check_walk_size(const WalkContext& ctx, bool with_snaps,
                     const char* what) {
  const int msg_rounds = ctx.R + (ctx.lookahead ? 1 : 0);
  if (ctx.n * msg_rounds > 28 || walk_state_bits(ctx, with_snaps) > 128)
    throw cap_error(std::string(what) + ": instance too large",
                    static_cast<std::uint64_t>(ctx.n) * ctx.n * ctx.R);
}

}  // namespace

HOEnumResult naive_enumerate_ho(const Strategy& f, const Predicate& del,
                                std::uint64_t budget) {
  const int n = del.n, R = del.horizon;
  if (f.n != n)
    throw std::invalid_argument("naive_enumerate_ho: universe mismatch");
  if (!collection_packable(n, R))
    throw cap_error("naive_enumerate_ho: instance too large",
                    static_cast<std::uint64_t>(n) * n * R);
  const MemberIndex idx(f, R);
  HOEnumResult result;
  std::set<std::uint64_t> keys;
  for (const Collection& c : del.collections) {
    WalkContext ctx = make_walk_context(f, del, c, &idx, budget);
    check_walk_size(ctx, true, "naive_enumerate_ho");
    std::vector<int> done(n, 0);
    std::vector<MsgBits> recv(n, 0);
    std::vector<std::uint32_t> snaps(n, 0);
    std::set<PackedState> visited;
    naive_walk(ctx, done, recv, snaps, visited, keys);
    result.work += ctx.work;
    if (!ctx.exhausted) {
      result.exact = false;
      break;
    }
  }
  for (std::uint64_t key : keys)
    result.collections.push_back(unpack_collection(key, n, R));
  std::sort(result.collections.begin(), result.collections.end());
  return result;
}

DeadlockWitness find_deadlock(const Strategy& f, const Predicate& del,
                              std::uint64_t budget) {
  if (f.n != del.n)
    throw std::invalid_argument("find_deadlock: universe mismatch");
  const MemberIndex idx(f, del.horizon);
  DeadlockWitness w;
  for (std::size_t ci = 0; ci < del.collections.size(); ++ci) {
    WalkContext ctx =
        make_walk_context(f, del, del.collections[ci], &idx, budget);
    check_walk_size(ctx, false, "find_deadlock");
    std::vector<int> done(del.n, 0);
    std::vector<MsgBits> recv(del.n, 0);
    std::set<PackedState> visited;
    int blocked = -1;
    if (deadlock_walk(ctx, done, recv, visited, blocked)) {
      w.found = true;
      w.collection_index = ci;
      w.blocked_process = blocked;
      w.description = process_name(blocked) +
                      " can never advance again in member #" +
                      std::to_string(ci);
      return w;
    }
    if (!ctx.exhausted) {
      w.exhausted = false;
      return w;
    }
  }
  return w;
}

}  // namespace heardof
