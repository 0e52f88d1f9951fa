#include "heardof/core.hpp"

#include <algorithm>

namespace heardof {

std::string process_name(int index) { return "p" + std::to_string(index + 1); }

std::string mask_to_string(Mask m, int n) {
  std::string out = "{";
  bool first = true;
  for (int k = 0; k < n; ++k) {
    if (m & (Mask(1) << k)) {
      if (!first) out += ",";
      out += process_name(k);
      first = false;
    }
  }
  out += "}";
  return out;
}

void check_universe(int n) {
  if (n < 1 || n > kMaxUniverse)
    throw std::invalid_argument("universe size must be in [1," +
                                std::to_string(kMaxUniverse) + "], got " +
                                std::to_string(n));
}

void check_horizon(int horizon) {
  if (horizon < 1)
    throw std::invalid_argument("horizon must be >= 1, got " +
                                std::to_string(horizon));
}

LocalState::LocalState(int round_, std::vector<Message> mes_)
    : round(round_), mes(std::move(mes_)) {
  if (round < 1) throw std::invalid_argument("local state round must be >= 1");
  std::sort(mes.begin(), mes.end());
  mes.erase(std::unique(mes.begin(), mes.end()), mes.end());
}

Mask LocalState::round_mask(int r) const {
  Mask out = 0;
  for (const Message& m : mes)
    if (m.round == r) out |= Mask(1) << m.sender;
  return out;
}

Mask obliv_view(const LocalState& q) { return q.round_mask(q.round); }

LocalState cons_view(const LocalState& q) {
  std::vector<Message> kept;
  kept.reserve(q.mes.size());
  for (const Message& m : q.mes)
    if (m.round <= q.round) kept.push_back(m);
  return LocalState(q.round, std::move(kept));
}

Mask after_view(const LocalState& q) { return q.round_mask(q.round + 1); }

Collection::Collection(int n_, int horizon_, Mask fill)
    : n(n_), horizon(horizon_) {
  check_universe(n);
  check_horizon(horizon);
  sets.assign(static_cast<std::size_t>(n) * horizon, fill);
}

Mask Collection::at(int round, int process) const {
  if (round < 1 || round > horizon)
    throw std::out_of_range("round " + std::to_string(round) +
                            " outside horizon [1," + std::to_string(horizon) +
                            "]");
  return sets[static_cast<std::size_t>(round - 1) * n + process];
}

void Collection::set(int round, int process, Mask value) {
  if (round < 1 || round > horizon)
    throw std::out_of_range("round " + std::to_string(round) +
                            " outside horizon [1," + std::to_string(horizon) +
                            "]");
  if (!mask_subset(value, full_mask(n)))
    throw std::invalid_argument("set is not a subset of the universe");
  sets[static_cast<std::size_t>(round - 1) * n + process] = value;
}

bool Collection::is_total() const {
  const Mask full = full_mask(n);
  return std::all_of(sets.begin(), sets.end(),
                     [full](Mask m) { return m == full; });
}

Collection total_collection(int n, int horizon) {
  return Collection(n, horizon, full_mask(n));
}

Mask kernel(const Collection& c, int round) {
  if (round < 1 || round > c.horizon)
    throw std::out_of_range("kernel: round " + std::to_string(round) +
                            " outside horizon [1," +
                            std::to_string(c.horizon) + "]");
  Mask acc = full_mask(c.n);
  for (int p = 0; p < c.n; ++p) acc &= c.at(round, p);
  return acc;
}

Collection combine_collections(const Collection& a, const Collection& b) {
  if (a.n != b.n || a.horizon != b.horizon)
    throw std::invalid_argument("combine_collections: shape mismatch");
  Collection out(a.n, a.horizon);
  for (std::size_t i = 0; i < a.sets.size(); ++i)
    out.sets[i] = a.sets[i] & b.sets[i];
  return out;
}

Collection concat_collections(const Collection& c1, int cut,
                              const Collection& c2, int out_horizon) {
  if (c1.n != c2.n)
    throw std::invalid_argument("concat_collections: universe mismatch");
  if (cut < 0 || cut > c1.horizon)
    throw std::invalid_argument("concat_collections: cut outside [0," +
                                std::to_string(c1.horizon) + "]");
  if (cut + c2.horizon < out_horizon)
    throw std::invalid_argument(
        "concat_collections: operands too short for requested horizon");
  Collection out(c1.n, out_horizon);
  for (int r = 1; r <= out_horizon; ++r)
    for (int p = 0; p < c1.n; ++p)
      out.set(r, p, r <= cut ? c1.at(r, p) : c2.at(r - cut, p));
  return out;
}

bool collection_packable(int n, int horizon) {
  return static_cast<long>(n) * n * horizon <= 64;
}

std::uint64_t pack_collection(const Collection& c) {
  std::uint64_t key = 0;
  for (Mask m : c.sets) key = (key << c.n) | m;
  return key;
}

Collection unpack_collection(std::uint64_t key, int n, int horizon) {
  Collection c(n, horizon);
  const std::uint64_t mask = (1u << n) - 1u;
  for (int i = static_cast<int>(c.sets.size()) - 1; i >= 0; --i) {
    c.sets[i] = static_cast<Mask>(key & mask);
    key >>= n;
  }
  return c;
}

}  // namespace heardof
