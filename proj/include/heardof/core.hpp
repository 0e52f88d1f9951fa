#pragma once

// Ground types: process sets as bitmasks, round-indexed collections,
// local states, and the pointwise collection operators.
//
// All round indices are 1-based (round 0 does not exist); process indices
// are 0-based and displayed as p1..pn. Collections are finite truncations
// at an explicit horizon R; every equality computed from them is an
// "at horizon R" statement.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace heardof {

using Mask = std::uint16_t;  // subset of the process universe

constexpr int kMaxUniverse = 12;

inline Mask full_mask(int n) { return static_cast<Mask>((1u << n) - 1u); }

inline int mask_card(Mask m) { return __builtin_popcount(m); }

inline bool mask_subset(Mask a, Mask b) { return (a & ~b) == 0; }

std::string process_name(int index);          // "p1", "p2", ...
std::string mask_to_string(Mask m, int n);    // "{p1,p3}"

void check_universe(int n);
void check_horizon(int horizon);

// Deterministic event/set ordering. `reversed` exists to demonstrate that
// every result is independent of the chosen order.
enum class EventOrder { lexicographic, reversed };

struct Message {
  int round = 1;  // may exceed the horizon by exactly one
  int sender = 0;

  friend auto operator<=>(const Message&, const Message&) = default;
};

// A local state of the round implementation: the process's current round
// and the set of (round, sender) messages it has received. The process
// identity is deliberately absent.
struct LocalState {
  int round = 1;
  std::vector<Message> mes;  // sorted, duplicate-free

  LocalState() = default;
  LocalState(int round_, std::vector<Message> mes_);

  // Senders of messages tagged with round r.
  Mask round_mask(int r) const;
};

// Senders heard for the current round: {k | <q.round, k> in q.mes}.
Mask obliv_view(const LocalState& q);

// Same round, messages filtered to rounds <= q.round. Idempotent.
LocalState cons_view(const LocalState& q);

// Senders of messages tagged with round q.round + 1.
Mask after_view(const LocalState& q);

// A dense (round, process) -> set-of-processes table, truncated at an
// explicit horizon. Used both for delivered collections and for heard-of
// collections; only the interpretation differs.
struct Collection {
  int n = 1;
  int horizon = 1;
  std::vector<Mask> sets;  // sets[(r-1)*n + p]

  Collection() = default;
  Collection(int n_, int horizon_, Mask fill = 0);

  Mask at(int round, int process) const;
  void set(int round, int process, Mask value);

  bool is_total() const;

  friend auto operator<=>(const Collection&, const Collection&) = default;
};

using DeliveredCollection = Collection;
using HeardOfCollection = Collection;

Collection total_collection(int n, int horizon);

// Kernel of c at r: the intersection of all round-r delivered sets.
Mask kernel(const Collection& c, int round);

// Pointwise intersection. Requires matching shapes.
Collection combine_collections(const Collection& a, const Collection& b);

// Rounds 1..cut from c1, then c2 shifted so that its round i becomes
// round cut+i; the result is truncated at out_horizon. cut = 0 yields c2.
Collection concat_collections(const Collection& c1, int cut,
                              const Collection& c2, int out_horizon);

// Fits any collection with n*n*horizon <= 64 bits; key order equals the
// lexicographic order on the sets table.
bool collection_packable(int n, int horizon);
std::uint64_t pack_collection(const Collection& c);
Collection unpack_collection(std::uint64_t key, int n, int horizon);

}  // namespace heardof
