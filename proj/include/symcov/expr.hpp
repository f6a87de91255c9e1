#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "symcov/common.hpp"

namespace symcov {

/// Expression AST for the scenario config language.
///
/// Grammar (EBNF):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' factor)?
///   base   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
///
/// Precedence: ^ binds tighter than unary minus, which binds tighter than
/// * and /, which bind tighter than + and -. ^ is right-associative.
/// Identifiers are chart coordinate names; `pi` is a constant; the callable
/// identifiers are sin, cos, exp.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Num, Ident, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind;
  double num = 0;
  std::string name;  // Ident / Call
  ExprPtr a, b;
};

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(size_t off, const std::string& msg)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

ExprPtr parse_expression(const std::string& text);
std::string expr_to_string(const ExprPtr& e);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);
/// Free identifiers (excluding pi and the function names).
std::vector<std::string> expr_free_idents(const ExprPtr& e);
double expr_eval(const ExprPtr& e, const std::map<std::string, double>& env);
ExprPtr expr_derivative(const ExprPtr& e, const std::string& var);

/// Binds coordinate names to vector slots; unknown identifiers error here.
std::function<double(const Vec&)> expr_bind(const ExprPtr& e,
                                            const std::vector<std::string>& coords);

// Convenience constructors (used by tests to hand-build reference ASTs).
ExprPtr enum_(double v);
ExprPtr eident(std::string name);
ExprPtr eneg(ExprPtr a);
ExprPtr ebin(Expr::Kind k, ExprPtr a, ExprPtr b);
ExprPtr ecall(std::string fn, ExprPtr a);

}  // namespace symcov
