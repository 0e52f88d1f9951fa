// Command-line front end: build predicates from expressions, extract
// minimal strategies, compute heard-of predicates, emit traces, run
// property checks and the theorem suite.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "heardof/analysis.hpp"
#include "heardof/json_io.hpp"
#include "heardof/parallel.hpp"

namespace {

using namespace heardof;
using nlohmann::json;

struct CommonOpts {
  int n = 3;
  int horizon = 2;
  std::string expr;
  std::string format = "json";
  std::uint64_t cap = 0;
  unsigned seed = 12345;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_expr) {
  cmd->add_option("--n", o.n, "universe size")->check(CLI::Range(1, 12));
  cmd->add_option("--horizon", o.horizon, "round horizon R")
      ->check(CLI::PositiveNumber);
  auto* e = cmd->add_option("--expr", o.expr, "predicate expression");
  if (needs_expr) e->required();
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--cap", o.cap, "enumeration cap override");
  cmd->add_option("--seed", o.seed, "seed for sampled tiers");
  cmd->add_option("--out", o.out, "write output to a file instead of stdout");
}

void emit(const CommonOpts& o, const std::string& payload) {
  if (o.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + o.out);
  f << payload;
}

Predicate build_from_expr(const CommonOpts& o) {
  if (o.cap) set_enumeration_cap(o.cap);
  return eval_expr(*parse_expr(o.expr), o.n, o.horizon);
}

Strategy pick_strategy(const CommonOpts& o, const Predicate& p,
                       const std::string& family,
                       const std::string& named) {
  if (!named.empty()) {
    if (named == "floss") return f_loss(o.n);
    if (named.rfind("fnf:", 0) == 0)
      return f_n_minus_f(o.n, std::stoi(named.substr(4)));
    if (named.rfind("@", 0) == 0) {
      std::ifstream f(named.substr(1));
      if (!f) throw std::runtime_error("cannot open strategy file");
      return strategy_from_json(json::parse(f));
    }
    throw CLI::ValidationError("--strategy must be floss, fnf:F or @file");
  }
  if (family == "cons") return minimal_conservative(p);
  return minimal_oblivious(p);
}

json strategy_text_or_json(const Strategy& f) { return strategy_to_json(f); }

Collection parse_collection_arg(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream f(arg.substr(1));
    if (!f) throw std::runtime_error("cannot open collection file");
    return collection_from_json(json::parse(f));
  }
  return collection_from_json(json::parse(arg));
}

std::string render_report(const TheoremReport& rep, const std::string& fmt) {
  if (fmt == "text") {
    std::string line = rep.theorem + ": " + rep.verdict;
    if (!rep.witness.is_null()) line += "  " + rep.witness.dump();
    return line + "\n";
  }
  return report_to_json(rep).dump(2) + "\n";
}

int run_build(const CommonOpts& o) {
  const Predicate p = build_from_expr(o);
  if (o.format == "text") {
    std::string text = p.expr + ": " + std::to_string(p.collections.size()) +
                       " collections at n=" + std::to_string(p.n) +
                       ", horizon=" + std::to_string(p.horizon) + "\n";
    emit(o, text);
  } else {
    emit(o, predicate_to_json(p).dump(2) + "\n");
  }
  return 0;
}

int run_minimal(const CommonOpts& o, const std::string& family) {
  const Predicate p = build_from_expr(o);
  const Strategy f =
      family == "cons" ? minimal_conservative(p) : minimal_oblivious(p);
  emit(o, strategy_text_or_json(f).dump(2) + "\n");
  return 0;
}

int run_ho(const CommonOpts& o, const std::string& family,
           const std::string& named, bool enumerate, std::uint64_t budget) {
  const Predicate p = build_from_expr(o);
  const Strategy f = pick_strategy(o, p, family, named);
  HeardOfPredicate ho;
  if (f.kind == StrategyKind::oblivious && !enumerate) {
    if (!p.has_total())
      throw std::runtime_error(
          "the predicate lacks the total collection; HOProd does not apply "
          "(pass --enumerate --budget N to run the scheduler search)");
    if (!oblivious_valid_for(f, p))
      throw std::runtime_error(
          "the strategy is not valid for this predicate");
    ho = generate_ho_oblivious(f, p);
  } else {
    if (!enumerate || budget == 0)
      throw std::runtime_error(
          "non-oblivious strategies need an explicit --enumerate --budget N");
    ho = generate_ho_enumerated(f, p, budget);
  }
  if (o.format == "text") {
    std::string text = "heard-of predicate: " +
                       std::to_string(ho.collections.size()) +
                       " collections (" +
                       (ho.tag == HOGenerator::hoprod ? "hoprod"
                        : ho.exact                    ? "enumerated"
                                                      : "enumerated, partial") +
                       ")\n";
    emit(o, text);
  } else {
    emit(o, ho_predicate_to_json(ho).dump(2) + "\n");
  }
  return 0;
}

int run_trace(const CommonOpts& o, const std::string& kind,
              const std::string& family, const std::string& named,
              const std::string& ho_arg, const std::string& coll_arg,
              int member, const std::string& order_name) {
  const EventOrder order = order_name == "reversed" ? EventOrder::reversed
                                                    : EventOrder::lexicographic;
  Execution t;
  if (kind == "canonical" || kind == "shifted") {
    if (ho_arg.empty())
      throw std::runtime_error("--kind " + kind +
                               " needs --ho <collection json or @file>");
    const Collection ho = parse_collection_arg(ho_arg);
    t = kind == "canonical" ? canonical_execution(ho, order)
                            : shifted_canonical_execution(ho, order);
  } else if (kind == "standard") {
    const Predicate p = build_from_expr(o);
    const Strategy f = pick_strategy(o, p, family, named);
    Collection c = total_collection(o.n, o.horizon);
    if (!coll_arg.empty())
      c = parse_collection_arg(coll_arg);
    else if (member >= 0) {
      if (member >= static_cast<int>(p.collections.size()))
        throw std::runtime_error("--member index beyond predicate size " +
                                 std::to_string(p.collections.size()));
      c = p.collections[member];
    }
    t = standard_execution(f, c, order);
  } else {
    throw CLI::ValidationError("unknown trace kind");
  }
  emit(o, o.format == "json" ? trace_to_json(t).dump(2) + "\n"
                             : trace_to_text(t));
  return 0;
}

int run_check(const CommonOpts& o, const std::string& property,
              const std::string& family, const std::string& named,
              std::uint64_t budget) {
  const Predicate p = build_from_expr(o);
  SuiteConfig cfg;
  cfg.n = o.n;
  cfg.horizon = o.horizon;
  cfg.seed = o.seed;
  if (budget) cfg.budget = budget;

  TheoremReport rep;
  if (property == "round-sym" || property == "prefix-sym" ||
      property == "common-round" || property == "common-prefix") {
    const bool value = property == "round-sym"     ? is_round_symmetric(p)
                       : property == "prefix-sym"  ? is_prefix_symmetric(p)
                       : property == "common-round" ? has_common_round(p)
                                                    : has_common_prefix(p);
    rep.theorem = "property-" + property;
    rep.params = {{"n", p.n}, {"horizon", p.horizon}, {"predicate", p.expr}};
    rep.verdict = value ? "holds-at-horizon" : "fails";
    rep.witness = json{{"value", value}};
  } else if (property == "validity") {
    const Strategy f = pick_strategy(o, p, family, named);
    rep.theorem = "strategy-validity";
    rep.params = {{"n", p.n},
                  {"horizon", p.horizon},
                  {"predicate", p.expr},
                  {"strategy", strategy_to_json(f)["kind"]}};
    if (f.kind == StrategyKind::oblivious) {
      rep.verdict =
          oblivious_valid_for(f, p) ? "holds-at-horizon" : "fails";
    } else if (f.kind == StrategyKind::conservative) {
      rep.verdict =
          conservative_valid_for(f, p) ? "holds-at-horizon" : "fails";
    } else {
      const DeadlockWitness w = find_deadlock(f, p, cfg.budget);
      rep.verdict = w.found          ? "fails"
                    : w.exhausted    ? "holds-at-horizon"
                                     : "partial-budget";
      if (w.found) rep.witness = w.description;
    }
  } else if (property == "domination") {
    if (family.empty())
      rep = check_global_domination_evidence(p, cfg);
    else
      rep = check_family_domination(p,
                                    family == "cons"
                                        ? StrategyKind::conservative
                                        : StrategyKind::oblivious,
                                    cfg);
  } else {
    throw CLI::ValidationError("unknown property");
  }
  emit(o, render_report(rep, o.format));
  return 0;
}

int run_suite(const CommonOpts& o, std::uint64_t budget,
              const std::string& order_name, bool timings) {
  if (o.cap) set_enumeration_cap(o.cap);
  SuiteConfig cfg;
  cfg.n = o.n;
  cfg.horizon = o.horizon;
  cfg.seed = o.seed;
  cfg.timings = timings;
  cfg.order = order_name == "reversed" ? EventOrder::reversed
                                       : EventOrder::lexicographic;
  if (budget) cfg.budget = budget;
  const std::vector<TheoremReport> reports = run_theorem_suite(cfg);
  std::string payload;
  if (o.format == "text") {
    for (const TheoremReport& r : reports) {
      payload += (r.failed() ? "[FAIL] " : r.holds() ? "[PASS] " : "[PART] ");
      payload += r.theorem + " " + r.verdict;
      if (timings) payload += " (" + std::to_string(r.elapsed_ms) + " ms)";
      payload += "\n";
    }
  } else {
    json arr = json::array();
    for (const TheoremReport& r : reports) arr.push_back(report_to_json(r));
    payload = arr.dump(2) + "\n";
  }
  emit(o, payload);
  return suite_passed(reports) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heard-of predicate analysis at a bounded horizon"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string family, named, kind = "standard", property;
  std::string ho_arg, coll_arg, order_name = "normal";
  int member = -1;
  std::uint64_t budget = 0;
  bool enumerate = false, timings = false, serial = false;

  auto* build = app.add_subcommand("build", "materialize a predicate");
  add_common(build, o, true);

  auto* minimal =
      app.add_subcommand("minimal", "minimal strategy of a predicate");
  add_common(minimal, o, true);
  minimal->add_option("--family", family, "obliv or cons")
      ->required()
      ->check(CLI::IsMember({"obliv", "cons"}));

  auto* ho = app.add_subcommand("ho", "heard-of predicate of a strategy");
  add_common(ho, o, true);
  ho->add_option("--family", family)->check(CLI::IsMember({"obliv", "cons"}));
  ho->add_option("--strategy", named, "floss, fnf:F or @file");
  ho->add_flag("--enumerate", enumerate, "run the scheduler enumeration");
  ho->add_option("--budget", budget, "enumeration budget");

  auto* trace = app.add_subcommand("trace", "emit an execution trace");
  add_common(trace, o, false);
  trace->add_option("--kind", kind)
      ->required()
      ->check(CLI::IsMember({"standard", "canonical", "shifted"}));
  trace->add_option("--family", family)->check(CLI::IsMember({"obliv", "cons"}));
  trace->add_option("--strategy", named, "floss, fnf:F or @file");
  trace->add_option("--ho", ho_arg, "heard-of collection (json or @file)");
  trace->add_option("--collection", coll_arg,
                    "delivered collection (json or @file)");
  trace->add_option("--member", member, "predicate member index");
  trace->add_option("--order", order_name)
      ->check(CLI::IsMember({"normal", "reversed"}));

  auto* check = app.add_subcommand("check", "run a property check");
  add_common(check, o, true);
  check->add_option("--property", property)
      ->required()
      ->check(CLI::IsMember({"round-sym", "prefix-sym", "common-round",
                             "common-prefix", "validity", "domination"}));
  check->add_option("--family", family)->check(CLI::IsMember({"obliv", "cons"}));
  check->add_option("--strategy", named, "floss, fnf:F or @file");
  check->add_option("--budget", budget, "search budget");

  auto* suite = app.add_subcommand("suite", "run the theorem-check suite");
  add_common(suite, o, false);
  suite->add_option("--budget", budget, "enumeration budget");
  suite->add_option("--order", order_name)
      ->check(CLI::IsMember({"normal", "reversed"}));
  suite->add_flag("--timings", timings, "report wall-clock times");
  suite->add_flag("--serial", serial, "disable the parallel kernels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (serial) heardof::parallel_enabled() = false;
    if (build->parsed()) return run_build(o);
    if (minimal->parsed()) return run_minimal(o, family);
    if (ho->parsed()) return run_ho(o, family, named, enumerate, budget);
    if (trace->parsed())
      return run_trace(o, kind, family, named, ho_arg, coll_arg, member,
                       order_name);
    if (check->parsed()) return run_check(o, property, family, named, budget);
    if (suite->parsed()) return run_suite(o, budget, order_name, timings);
  } catch (const std::exception& e) {
    std::cerr << "heardof: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
