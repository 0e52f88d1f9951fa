#pragma once

// Predicate expression trees and their text form.
//
// Grammar (ASCII, with unicode aliases in comments):
//   expr   := term (('|' | '(*)') expr)?          combination/union chains
//   term   := atom | atom '~>' term | atom '^w' | '(' expr ')'
//   atom   := 'total' | 'crash1@' INT | 'crash(' INT ')' | 'loss(' INT ')'
//           | 'crashne(' INT ')'
// '^w' binds tightest, then '~>', then '(*)', then '|'.
// Aliases: '⊗' for '(*)', '⇝' for '~>', '^ω' for '^w'.

#include <memory>
#include <string>

#include "heardof/predicate.hpp"

namespace heardof {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    total,
    crash1_at,   // param = round
    crashf,      // param = F
    lossl,       // param = L
    crashne,     // param = F; at most F crashes, no two in the same round
    literal,     // an explicit collection set
    union_op,
    combine_op,
    succeed_op,
    repeat_op,
  };

  Kind kind = Kind::total;
  int param = 0;
  ExprPtr lhs, rhs;                  // operators
  std::vector<Collection> literal;   // Kind::literal only

  bool operator==(const Expr& other) const;
};

struct parse_error : std::runtime_error {
  std::size_t position;
  parse_error(const std::string& what, std::size_t position_)
      : std::runtime_error(what), position(position_) {}
};

ExprPtr parse_expr(const std::string& text);

std::string pretty(const Expr& e);

// Materializes the predicate at the given scale. Parameters are range
// checked here, where the horizon is known.
Predicate eval_expr(const Expr& e, int n, int horizon);

ExprPtr expr_total();
ExprPtr expr_crash1_at(int round);
ExprPtr expr_crashf(int faults);
ExprPtr expr_lossl(int losses);
ExprPtr expr_binary(Expr::Kind op, ExprPtr lhs, ExprPtr rhs);
ExprPtr expr_repeat(ExprPtr operand);

}  // namespace heardof
