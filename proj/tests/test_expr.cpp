#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "heardof/expr.hpp"
#include "heardof/json_io.hpp"

using namespace heardof;

TEST_CASE("grammar: atoms, operators, precedence") {
  const ExprPtr succ = parse_expr("crash(1) ~> total");
  CHECK(succ->kind == Expr::Kind::succeed_op);
  CHECK(succ->lhs->kind == Expr::Kind::crashf);
  CHECK(succ->rhs->kind == Expr::Kind::total);

  const ExprPtr rep = parse_expr("(crash1@1)^w");
  CHECK(rep->kind == Expr::Kind::repeat_op);
  CHECK(rep->lhs->kind == Expr::Kind::crash1_at);
  CHECK(rep->lhs->param == 1);

  // ^w binds tighter than ~>, which binds tighter than (*), then |
  const ExprPtr e = parse_expr("total | crash(1) (*) crash1@2^w ~> loss(1)");
  CHECK(e->kind == Expr::Kind::union_op);
  CHECK(e->rhs->kind == Expr::Kind::combine_op);
  CHECK(e->rhs->rhs->kind == Expr::Kind::succeed_op);
  CHECK(e->rhs->rhs->lhs->kind == Expr::Kind::repeat_op);

  // unicode aliases
  CHECK(*parse_expr("crash(1) ⊗ total") ==
        *parse_expr("crash(1) (*) total"));
  CHECK(*parse_expr("crash(1) ⇝ total") ==
        *parse_expr("crash(1) ~> total"));
  CHECK(*parse_expr("total^ω") == *parse_expr("total^w"));
}

TEST_CASE("syntax errors carry a position") {
  try {
    (void)parse_expr("crash(");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(e.position == 6);
  }
  CHECK_THROWS_AS((void)parse_expr(""), parse_error);
  CHECK_THROWS_AS((void)parse_expr("total total"), parse_error);
  CHECK_THROWS_AS((void)parse_expr("(total"), parse_error);
}

TEST_CASE("parse after pretty is the identity on expression trees") {
  std::mt19937 rng(61);
  auto random_tree = [&](auto&& self, int depth) -> ExprPtr {
    if (depth == 0 || rng() % 3 == 0) {
      switch (rng() % 5) {
        case 0: return expr_total();
        case 1: return expr_crash1_at(1 + static_cast<int>(rng() % 3));
        case 2: return expr_crashf(static_cast<int>(rng() % 3));
        case 3: return expr_lossl(static_cast<int>(rng() % 3));
        default: return parse_expr("crashne(2)");
      }
    }
    switch (rng() % 4) {
      case 0:
        return expr_binary(Expr::Kind::union_op, self(self, depth - 1),
                           self(self, depth - 1));
      case 1:
        return expr_binary(Expr::Kind::combine_op, self(self, depth - 1),
                           self(self, depth - 1));
      case 2:
        return expr_binary(Expr::Kind::succeed_op, self(self, depth - 1),
                           self(self, depth - 1));
      default:
        return expr_repeat(self(self, depth - 1));
    }
  };
  for (int i = 0; i < 200; ++i) {
    const ExprPtr t = random_tree(random_tree, 3);
    CHECK(*parse_expr(pretty(*t)) == *t);
  }
}

TEST_CASE("evaluation matches the builders") {
  CHECK(eval_expr(*parse_expr("crash(1)"), 3, 2) == build_crashf(3, 2, 1));
  CHECK(eval_expr(*parse_expr("crash1@2"), 3, 2) == build_crash1_at(3, 2, 2));
  CHECK(eval_expr(*parse_expr("loss(1)"), 3, 2) == build_lossl(3, 2, 1));
  CHECK(eval_expr(*parse_expr("crash1@1 | crash1@2"), 3, 2) ==
        union_pred(build_crash1_at(3, 2, 1), build_crash1_at(3, 2, 2)));
  CHECK(eval_expr(*parse_expr("(crash1@1)^w"), 3, 2) ==
        repeat_pred(build_crash1_at(3, 2, 1)));
  CHECK_THROWS_AS((void)eval_expr(*parse_expr("crash1@5"), 3, 2),
                  std::out_of_range);
}

TEST_CASE("the one-crash-per-round preset") {
  // two crashes in distinct rounds = the combination over round pairs
  const Predicate p = eval_expr(*parse_expr("crashne(2)"), 3, 2);
  const Predicate expected = combine_pred(build_crash1_at(3, 2, 1),
                                          build_crash1_at(3, 2, 2));
  CHECK(p.collections == expected.collections);
  CHECK(eval_expr(*parse_expr("crashne(0)"), 3, 2) == build_total(3, 2));
  CHECK_THROWS_AS((void)eval_expr(*parse_expr("crashne(3)"), 3, 2),
                  std::invalid_argument);
}

TEST_CASE("predicate json round-trip") {
  const Predicate p = eval_expr(*parse_expr("crash(1) ~> total"), 3, 2);
  const Predicate back = predicate_from_json(predicate_to_json(p));
  CHECK(back == p);
  CHECK(back.expr == p.expr);
  // canonical order: serialization is stable under reserialization
  CHECK(predicate_to_json(back).dump() == predicate_to_json(p).dump());
}

TEST_CASE("strategy json round-trip") {
  const Strategy fo = f_n_minus_f(3, 1);
  CHECK(strategy_from_json(strategy_to_json(fo)) == fo);
  const Strategy fc = minimal_conservative(build_crashf(3, 2, 1));
  CHECK(strategy_from_json(strategy_to_json(fc)) == fc);
  const Strategy fl = f_loss(3);
  CHECK(strategy_from_json(strategy_to_json(fl)) == fl);
  const Strategy fe = materialize_strategy(fo, 2);
  CHECK(strategy_from_json(strategy_to_json(fe)) == fe);
}

TEST_CASE("trace text round-trip") {
  const Execution t = canonical_execution(total_collection(2, 2));
  const std::string text = trace_to_text(t);
  const Execution back = trace_from_text(text, 2, 2);
  CHECK(back.events == t.events);
  CHECK(trace_to_text(back) == text);
  CHECK_THROWS_AS((void)trace_from_text("D 1 9 0\n", 2, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)trace_from_text("X\n", 2, 2), std::invalid_argument);
}
