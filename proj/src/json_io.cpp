#include "heardof/json_io.hpp"

#include <sstream>

namespace heardof {

using nlohmann::json;

namespace {

json mask_to_indices(Mask m, int n) {
  json arr = json::array();
  for (int k = 0; k < n; ++k)
    if (m & (Mask(1) << k)) arr.push_back(k);
  return arr;
}

Mask mask_from_indices(const json& arr, int n) {
  Mask m = 0;
  for (const auto& v : arr) {
    const int k = v.get<int>();
    if (k < 0 || k >= n)
      throw std::invalid_argument("sender index out of range: " +
                                  std::to_string(k));
    m |= Mask(1) << k;
  }
  return m;
}

}  // namespace

json collection_to_json(const Collection& c) {
  json j;
  j["n"] = c.n;
  j["horizon"] = c.horizon;
  json rounds = json::array();
  for (int r = 1; r <= c.horizon; ++r) {
    json row = json::array();
    for (int p = 0; p < c.n; ++p) row.push_back(mask_to_indices(c.at(r, p), c.n));
    rounds.push_back(std::move(row));
  }
  j["sets"] = std::move(rounds);
  return j;
}

Collection collection_from_json(const json& j) {
  Collection c(j.at("n").get<int>(), j.at("horizon").get<int>());
  const json& rounds = j.at("sets");
  if (static_cast<int>(rounds.size()) != c.horizon)
    throw std::invalid_argument("collection sets: wrong round count");
  for (int r = 1; r <= c.horizon; ++r) {
    const json& row = rounds[r - 1];
    if (static_cast<int>(row.size()) != c.n)
      throw std::invalid_argument("collection sets: wrong row width");
    for (int p = 0; p < c.n; ++p)
      c.set(r, p, mask_from_indices(row[p], c.n));
  }
  return c;
}

json predicate_to_json(const Predicate& p) {
  json j;
  j["n"] = p.n;
  j["horizon"] = p.horizon;
  j["expr"] = p.expr;
  json members = json::array();
  for (const Collection& c : p.collections)
    members.push_back(collection_to_json(c));
  j["collections"] = std::move(members);
  return j;
}

Predicate predicate_from_json(const json& j) {
  std::vector<Collection> members;
  for (const auto& m : j.at("collections"))
    members.push_back(collection_from_json(m));
  return make_predicate(j.at("n").get<int>(), j.at("horizon").get<int>(),
                        std::move(members),
                        j.value("expr", std::string("literal")));
}

json strategy_to_json(const Strategy& f) {
  json j;
  switch (f.kind) {
    case StrategyKind::oblivious: {
      j["kind"] = "oblivious";
      j["n"] = f.n;
      json nexts = json::array();
      for (Mask m : f.nexts) nexts.push_back(mask_to_indices(m, f.n));
      j["nexts"] = std::move(nexts);
      break;
    }
    case StrategyKind::conservative: {
      j["kind"] = "conservative";
      j["n"] = f.n;
      j["horizon"] = f.horizon;
      json states = json::array();
      for (const ConsState& s : f.nextsC) {
        json st;
        st["round"] = s.round;
        json prefix = json::array();
        for (Mask m : s.prefix) prefix.push_back(mask_to_indices(m, f.n));
        st["prefix"] = std::move(prefix);
        states.push_back(std::move(st));
      }
      j["nextsC"] = std::move(states);
      break;
    }
    case StrategyKind::future_one_loss:
      j["kind"] = "f_loss";
      j["n"] = f.n;
      break;
    case StrategyKind::explicit_set: {
      j["kind"] = "explicit";
      j["n"] = f.n;
      j["horizon"] = f.horizon;
      json states = json::array();
      for (const BoundedState& s : f.states) {
        json st;
        st["round"] = s.round;
        json rows = json::array();
        for (Mask m : s.by_round) rows.push_back(mask_to_indices(m, f.n));
        st["by_round"] = std::move(rows);
        states.push_back(std::move(st));
      }
      j["states"] = std::move(states);
      break;
    }
  }
  return j;
}

Strategy strategy_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  if (kind == "oblivious") {
    std::vector<Mask> nexts;
    for (const auto& m : j.at("nexts"))
      nexts.push_back(mask_from_indices(m, n));
    return make_oblivious(n, std::move(nexts));
  }
  if (kind == "conservative") {
    const int horizon = j.at("horizon").get<int>();
    std::vector<ConsState> states;
    for (const auto& st : j.at("nextsC")) {
      ConsState s;
      s.round = st.at("round").get<int>();
      for (const auto& m : st.at("prefix"))
        s.prefix.push_back(mask_from_indices(m, n));
      states.push_back(std::move(s));
    }
    return make_conservative(n, horizon, std::move(states));
  }
  if (kind == "f_loss") return f_loss(n);
  if (kind == "explicit") {
    Strategy f;
    f.kind = StrategyKind::explicit_set;
    f.n = n;
    f.horizon = j.at("horizon").get<int>();
    for (const auto& st : j.at("states")) {
      BoundedState s;
      s.round = st.at("round").get<int>();
      for (const auto& m : st.at("by_round"))
        s.by_round.push_back(mask_from_indices(m, n));
      if (static_cast<int>(s.by_round.size()) != f.horizon + 1)
        throw std::invalid_argument("explicit state: wrong window size");
      f.states.push_back(std::move(s));
    }
    std::sort(f.states.begin(), f.states.end());
    return f;
  }
  throw std::invalid_argument("unknown strategy kind: " + kind);
}

json ho_predicate_to_json(const HeardOfPredicate& p) {
  json j;
  j["n"] = p.n;
  j["horizon"] = p.horizon;
  json gen;
  switch (p.tag) {
    case HOGenerator::hoprod: {
      gen["type"] = "hoprod";
      json basis = json::array();
      for (Mask m : p.basis) basis.push_back(mask_to_indices(m, p.n));
      gen["basis"] = std::move(basis);
      break;
    }
    case HOGenerator::enumerated:
      gen["type"] = "enumerated";
      gen["exact"] = p.exact;
      break;
    case HOGenerator::literal:
      gen["type"] = "literal";
      break;
  }
  j["generator"] = std::move(gen);
  json members = json::array();
  for (const Collection& c : p.collections)
    members.push_back(collection_to_json(c));
  j["collections"] = std::move(members);
  return j;
}

HeardOfPredicate ho_predicate_from_json(const json& j) {
  HeardOfPredicate p;
  p.n = j.at("n").get<int>();
  p.horizon = j.at("horizon").get<int>();
  const json& gen = j.at("generator");
  const std::string type = gen.at("type").get<std::string>();
  if (type == "hoprod") {
    p.tag = HOGenerator::hoprod;
    for (const auto& m : gen.at("basis"))
      p.basis.push_back(mask_from_indices(m, p.n));
  } else if (type == "enumerated") {
    p.tag = HOGenerator::enumerated;
    p.exact = gen.value("exact", true);
  } else if (type == "literal") {
    p.tag = HOGenerator::literal;
  } else {
    throw std::invalid_argument("unknown generator type: " + type);
  }
  for (const auto& m : j.at("collections"))
    p.collections.push_back(collection_from_json(m));
  std::sort(p.collections.begin(), p.collections.end());
  return p;
}

json report_to_json(const TheoremReport& r) {
  json j;
  j["theorem"] = r.theorem;
  j["params"] = r.params;
  j["verdict"] = r.verdict;
  if (!r.witness.is_null()) j["witness"] = r.witness;
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

std::string trace_to_text(const Execution& t) {
  std::ostringstream out;
  for (const Event& e : t.events) {
    switch (e.type) {
      case Event::Type::deliver:
        out << "D " << e.round << ' ' << e.sender << ' ' << e.process << '\n';
        break;
      case Event::Type::next:
        out << "N " << e.process << '\n';
        break;
      case Event::Type::stop:
        out << "S\n";
        break;
    }
  }
  return out.str();
}

Execution trace_from_text(const std::string& text, int n, int horizon) {
  check_universe(n);
  check_horizon(horizon);
  Execution t{n, horizon, {}};
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    auto bad = [&](const std::string& why) {
      throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                  ": " + why);
    };
    if (tag == 'D') {
      int r = 0, k = -1, j = -1;
      if (!(ls >> r >> k >> j)) bad("expected 'D round sender receiver'");
      if (r < 1) bad("round must be >= 1");
      if (k < 0 || k >= n || j < 0 || j >= n) bad("process index out of range");
      t.events.push_back(Event::make_deliver(r, k, j));
    } else if (tag == 'N') {
      int j = -1;
      if (!(ls >> j)) bad("expected 'N process'");
      if (j < 0 || j >= n) bad("process index out of range");
      t.events.push_back(Event::make_next(j));
    } else if (tag == 'S') {
      t.events.push_back(Event::make_stop());
    } else {
      bad("unknown event tag");
    }
  }
  return t;
}

json trace_to_json(const Execution& t) {
  json arr = json::array();
  for (const Event& e : t.events) {
    json ev;
    switch (e.type) {
      case Event::Type::deliver:
        ev["type"] = "D";
        ev["round"] = e.round;
        ev["sender"] = e.sender;
        ev["receiver"] = e.process;
        break;
      case Event::Type::next:
        ev["type"] = "N";
        ev["process"] = e.process;
        break;
      case Event::Type::stop:
        ev["type"] = "S";
        break;
    }
    arr.push_back(std::move(ev));
  }
  return arr;
}

}  // namespace heardof
