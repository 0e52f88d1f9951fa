#include "heardof/expr.hpp"

namespace heardof {

bool Expr::operator==(const Expr& other) const {
  if (kind != other.kind || param != other.param) return false;
  if (literal != other.literal) return false;
  auto eq = [](const ExprPtr& a, const ExprPtr& b) {
    if (!a != !b) return false;
    return !a || *a == *b;
  };
  return eq(lhs, other.lhs) && eq(rhs, other.rhs);
}

ExprPtr expr_total() { return std::make_shared<Expr>(); }

ExprPtr expr_crash1_at(int round) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::crash1_at;
  e->param = round;
  return e;
}

ExprPtr expr_crashf(int faults) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::crashf;
  e->param = faults;
  return e;
}

ExprPtr expr_lossl(int losses) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::lossl;
  e->param = losses;
  return e;
}

ExprPtr expr_binary(Expr::Kind op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr expr_repeat(ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::repeat_op;
  e->lhs = std::move(operand);
  return e;
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& text_) : text(text_) {}

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t'))
      ++pos;
  }

  bool eat(const char* token) {
    skip_ws();
    const std::size_t len = std::string::traits_type::length(token);
    if (text.compare(pos, len, token) == 0) {
      pos += len;
      return true;
    }
    return false;
  }

  bool peek(const char* token) {
    skip_ws();
    return text.compare(pos, std::string::traits_type::length(token), token) ==
           0;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw parse_error("syntax error at position " + std::to_string(pos) +
                          ": " + what,
                      pos);
  }

  int integer() {
    skip_ws();
    if (pos >= text.size() || !isdigit(static_cast<unsigned char>(text[pos])))
      fail("expected an integer");
    int value = 0;
    while (pos < text.size() &&
           isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + (text[pos] - '0');
      if (value > 1'000'000) fail("integer too large");
      ++pos;
    }
    return value;
  }

  ExprPtr parse() {
    ExprPtr e = parse_union();
    skip_ws();
    if (pos != text.size()) fail("trailing input");
    return e;
  }

  ExprPtr parse_union() {
    ExprPtr e = parse_combine();
    while (true) {
      skip_ws();
      // '(*)' must not be mistaken for '|'s absence; only '|' binds here.
      if (eat("|"))
        e = expr_binary(Expr::Kind::union_op, e, parse_combine());
      else
        return e;
    }
  }

  ExprPtr parse_combine() {
    ExprPtr e = parse_succeed();
    while (true) {
      skip_ws();
      if (eat("(*)") || eat("⊗"))  // ⊗
        e = expr_binary(Expr::Kind::combine_op, e, parse_succeed());
      else
        return e;
    }
  }

  ExprPtr parse_succeed() {
    ExprPtr e = parse_postfix();
    skip_ws();
    if (eat("~>") || eat("⇝"))  // ⇝
      return expr_binary(Expr::Kind::succeed_op, e, parse_succeed());
    return e;
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_atom();
    while (true) {
      skip_ws();
      if (eat("^w") || eat("^ω"))  // ^ω
        e = expr_repeat(e);
      else
        return e;
    }
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (eat("total")) return expr_total();
    if (eat("crash1@")) return expr_crash1_at(integer());
    if (eat("crashne(")) {
      const int f = integer();
      if (!eat(")")) fail("expected ')'");
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::crashne;
      e->param = f;
      return e;
    }
    if (eat("crash(")) {
      const int f = integer();
      if (!eat(")")) fail("expected ')'");
      return expr_crashf(f);
    }
    if (eat("loss(")) {
      const int l = integer();
      if (!eat(")")) fail("expected ')'");
      return expr_lossl(l);
    }
    if (eat("(")) {
      ExprPtr e = parse_union();
      if (!eat(")")) fail("expected ')'");
      return e;
    }
    fail("expected an atom");
  }
};

}  // namespace

ExprPtr parse_expr(const std::string& text) { return Parser(text).parse(); }

std::string pretty(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::total: return "total";
    case Expr::Kind::crash1_at: return "crash1@" + std::to_string(e.param);
    case Expr::Kind::crashf: return "crash(" + std::to_string(e.param) + ")";
    case Expr::Kind::lossl: return "loss(" + std::to_string(e.param) + ")";
    case Expr::Kind::crashne:
      return "crashne(" + std::to_string(e.param) + ")";
    case Expr::Kind::literal: return "literal";
    case Expr::Kind::union_op:
      return "(" + pretty(*e.lhs) + " | " + pretty(*e.rhs) + ")";
    case Expr::Kind::combine_op:
      return "(" + pretty(*e.lhs) + " (*) " + pretty(*e.rhs) + ")";
    case Expr::Kind::succeed_op:
      return "(" + pretty(*e.lhs) + " ~> " + pretty(*e.rhs) + ")";
    case Expr::Kind::repeat_op: {
      const Expr& inner = *e.lhs;
      const bool atomic = inner.kind == Expr::Kind::total ||
                          inner.kind == Expr::Kind::crash1_at ||
                          inner.kind == Expr::Kind::crashf ||
                          inner.kind == Expr::Kind::lossl ||
                          inner.kind == Expr::Kind::crashne;
      const std::string body = pretty(inner);
      return (atomic ? body : "(" + body + ")") + "^w";
    }
  }
  return "?";
}

namespace {

Predicate eval_crashne(const Expr& e, int n, int horizon) {
  const int faults = e.param;
  if (faults < 0) throw std::invalid_argument("crashne(F): F must be >= 0");
  if (faults == 0) return build_total(n, horizon);
  if (faults > horizon)
    throw std::invalid_argument(
        "crashne(" + std::to_string(faults) + ") needs " +
        std::to_string(faults) + " distinct rounds but the horizon is " +
        std::to_string(horizon));
  // Union over round combinations of the per-round single-crash blocks.
  std::vector<int> rounds(faults);
  Predicate acc;
  bool first = true;
  auto rec = [&](auto&& self, int from, int depth) -> void {
    if (depth == faults) {
      Predicate term = build_crash1_at(n, horizon, rounds[0]);
      for (int i = 1; i < faults; ++i)
        term = combine_pred(term, build_crash1_at(n, horizon, rounds[i]));
      acc = first ? term : union_pred(acc, term);
      first = false;
      return;
    }
    for (int r = from; r <= horizon; ++r) {
      rounds[depth] = r;
      self(self, r + 1, depth + 1);
    }
  };
  rec(rec, 1, 0);
  acc.expr = pretty(e);
  return acc;
}

}  // namespace

Predicate eval_expr(const Expr& e, int n, int horizon) {
  switch (e.kind) {
    case Expr::Kind::total: return build_total(n, horizon);
    case Expr::Kind::crash1_at: return build_crash1_at(n, horizon, e.param);
    case Expr::Kind::crashf: return build_crashf(n, horizon, e.param);
    case Expr::Kind::lossl: return build_lossl(n, horizon, e.param);
    case Expr::Kind::crashne: return eval_crashne(e, n, horizon);
    case Expr::Kind::literal: {
      Predicate p = make_predicate(n, horizon, e.literal, "literal");
      return p;
    }
    case Expr::Kind::union_op: {
      Predicate p =
          union_pred(eval_expr(*e.lhs, n, horizon), eval_expr(*e.rhs, n, horizon));
      p.expr = pretty(e);
      return p;
    }
    case Expr::Kind::combine_op: {
      Predicate p = combine_pred(eval_expr(*e.lhs, n, horizon),
                                 eval_expr(*e.rhs, n, horizon));
      p.expr = pretty(e);
      return p;
    }
    case Expr::Kind::succeed_op: {
      Predicate p = succeed_pred(eval_expr(*e.lhs, n, horizon),
                                 eval_expr(*e.rhs, n, horizon));
      p.expr = pretty(e);
      return p;
    }
    case Expr::Kind::repeat_op: {
      Predicate p = repeat_pred(eval_expr(*e.lhs, n, horizon));
      p.expr = pretty(e);
      return p;
    }
  }
  throw std::logic_error("unhandled expression kind");
}

}  // namespace heardof
