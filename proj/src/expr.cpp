#include "symcov/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace symcov {

namespace {

struct Parser {
  const std::string& s;
  size_t at = 0;

  void skip_ws() {
    while (at < s.size() && std::isspace(static_cast<unsigned char>(s[at]))) ++at;
  }
  char peek() {
    skip_ws();
    return at < s.size() ? s[at] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++at;
      return true;
    }
    return false;
  }

  ExprPtr parse() {
    auto e = expr();
    skip_ws();
    if (at != s.size()) throw ParseError(at, "unexpected trailing input");
    return e;
  }

  ExprPtr expr() {
    auto lhs = term();
    while (true) {
      if (eat('+'))
        lhs = ebin(Expr::Kind::Add, lhs, term());
      else if (eat('-'))
        lhs = ebin(Expr::Kind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  ExprPtr term() {
    auto lhs = factor();
    while (true) {
      if (eat('*'))
        lhs = ebin(Expr::Kind::Mul, lhs, factor());
      else if (eat('/'))
        lhs = ebin(Expr::Kind::Div, lhs, factor());
      else
        return lhs;
    }
  }

  ExprPtr factor() {
    if (eat('-')) return eneg(factor());
    auto b = base();
    if (eat('^')) return ebin(Expr::Kind::Pow, b, factor());  // right-associative
    return b;
  }

  ExprPtr base() {
    const char c = peek();
    if (c == '(') {
      ++at;
      auto e = expr();
      if (!eat(')')) throw ParseError(at, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id = ident();
      if (eat('(')) {
        if (id != "sin" && id != "cos" && id != "exp")
          throw ParseError(at, "unknown function '" + id + "'");
        auto arg = expr();
        if (!eat(')')) throw ParseError(at, "expected ')' after call argument");
        return ecall(id, arg);
      }
      return eident(id);
    }
    throw ParseError(at, "expected a number, identifier or '('");
  }

  ExprPtr number() {
    skip_ws();
    size_t start = at;
    while (at < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[at])) || s[at] == '.' || s[at] == 'e' ||
            s[at] == 'E' || ((s[at] == '+' || s[at] == '-') && at > start &&
                             (s[at - 1] == 'e' || s[at - 1] == 'E'))))
      ++at;
    try {
      size_t used = 0;
      double v = std::stod(s.substr(start, at - start), &used);
      if (used != at - start) throw std::invalid_argument("");
      return enum_(v);
    } catch (...) {
      throw ParseError(start, "malformed number");
    }
  }

  std::string ident() {
    skip_ws();
    size_t start = at;
    while (at < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[at])) || s[at] == '_'))
      ++at;
    return s.substr(start, at - start);
  }
};

void collect_idents(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Ident && e->name != "pi") out.insert(e->name);
  collect_idents(e->a, out);
  collect_idents(e->b, out);
}

}  // namespace

ExprPtr enum_(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Num;
  e->num = v;
  return e;
}
ExprPtr eident(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Ident;
  e->name = std::move(name);
  return e;
}
ExprPtr eneg(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Neg;
  e->a = std::move(a);
  return e;
}
ExprPtr ebin(Expr::Kind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
ExprPtr ecall(std::string fn, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Call;
  e->name = std::move(fn);
  e->a = std::move(a);
  return e;
}

ExprPtr parse_expression(const std::string& text) {
  Parser p{text};
  return p.parse();
}

std::string expr_to_string(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Num: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", e->num);
      return buf;
    }
    case Expr::Kind::Ident: return e->name;
    case Expr::Kind::Neg: return "(-" + expr_to_string(e->a) + ")";
    case Expr::Kind::Add: return "(" + expr_to_string(e->a) + "+" + expr_to_string(e->b) + ")";
    case Expr::Kind::Sub: return "(" + expr_to_string(e->a) + "-" + expr_to_string(e->b) + ")";
    case Expr::Kind::Mul: return "(" + expr_to_string(e->a) + "*" + expr_to_string(e->b) + ")";
    case Expr::Kind::Div: return "(" + expr_to_string(e->a) + "/" + expr_to_string(e->b) + ")";
    case Expr::Kind::Pow: return "(" + expr_to_string(e->a) + "^" + expr_to_string(e->b) + ")";
    case Expr::Kind::Call: return e->name + "(" + expr_to_string(e->a) + ")";
  }
  return "?";
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Num: return a->num == b->num;
    case Expr::Kind::Ident: return a->name == b->name;
    case Expr::Kind::Neg: return expr_equal(a->a, b->a);
    case Expr::Kind::Call: return a->name == b->name && expr_equal(a->a, b->a);
    default: return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
  }
}

std::vector<std::string> expr_free_idents(const ExprPtr& e) {
  std::set<std::string> s;
  collect_idents(e, s);
  return {s.begin(), s.end()};
}

double expr_eval(const ExprPtr& e, const std::map<std::string, double>& env) {
  switch (e->kind) {
    case Expr::Kind::Num: return e->num;
    case Expr::Kind::Ident: {
      if (e->name == "pi") return 3.14159265358979323846264338327950288;
      auto it = env.find(e->name);
      if (it == env.end()) throw std::invalid_argument("unknown identifier '" + e->name + "'");
      return it->second;
    }
    case Expr::Kind::Neg: return -expr_eval(e->a, env);
    case Expr::Kind::Add: return expr_eval(e->a, env) + expr_eval(e->b, env);
    case Expr::Kind::Sub: return expr_eval(e->a, env) - expr_eval(e->b, env);
    case Expr::Kind::Mul: return expr_eval(e->a, env) * expr_eval(e->b, env);
    case Expr::Kind::Div: return expr_eval(e->a, env) / expr_eval(e->b, env);
    case Expr::Kind::Pow: return std::pow(expr_eval(e->a, env), expr_eval(e->b, env));
    case Expr::Kind::Call: {
      const double x = expr_eval(e->a, env);
      if (e->name == "sin") return std::sin(x);
      if (e->name == "cos") return std::cos(x);
      return std::exp(x);
    }
  }
  throw std::logic_error("unreachable");
}

ExprPtr expr_derivative(const ExprPtr& e, const std::string& var) {
  switch (e->kind) {
    case Expr::Kind::Num: return enum_(0);
    case Expr::Kind::Ident: return enum_(e->name == var ? 1 : 0);
    case Expr::Kind::Neg: return eneg(expr_derivative(e->a, var));
    case Expr::Kind::Add:
      return ebin(Expr::Kind::Add, expr_derivative(e->a, var), expr_derivative(e->b, var));
    case Expr::Kind::Sub:
      return ebin(Expr::Kind::Sub, expr_derivative(e->a, var), expr_derivative(e->b, var));
    case Expr::Kind::Mul:
      return ebin(Expr::Kind::Add,
                  ebin(Expr::Kind::Mul, expr_derivative(e->a, var), e->b),
                  ebin(Expr::Kind::Mul, e->a, expr_derivative(e->b, var)));
    case Expr::Kind::Div:
      // (a/b)' = a'/b - a b'/b^2
      return ebin(Expr::Kind::Sub, ebin(Expr::Kind::Div, expr_derivative(e->a, var), e->b),
                  ebin(Expr::Kind::Div, ebin(Expr::Kind::Mul, e->a, expr_derivative(e->b, var)),
                       ebin(Expr::Kind::Mul, e->b, e->b)));
    case Expr::Kind::Pow: {
      if (e->b->kind == Expr::Kind::Num) {
        // (a^n)' = n a^(n-1) a'
        return ebin(Expr::Kind::Mul,
                    ebin(Expr::Kind::Mul, enum_(e->b->num),
                         ebin(Expr::Kind::Pow, e->a, enum_(e->b->num - 1))),
                    expr_derivative(e->a, var));
      }
      throw std::domain_error("derivative of a^b with non-constant exponent is unsupported");
    }
    case Expr::Kind::Call: {
      const auto da = expr_derivative(e->a, var);
      if (e->name == "sin") return ebin(Expr::Kind::Mul, ecall("cos", e->a), da);
      if (e->name == "cos") return eneg(ebin(Expr::Kind::Mul, ecall("sin", e->a), da));
      return ebin(Expr::Kind::Mul, ecall("exp", e->a), da);  // exp
    }
  }
  throw std::logic_error("unreachable");
}

std::function<double(const Vec&)> expr_bind(const ExprPtr& e,
                                            const std::vector<std::string>& coords) {
  for (const auto& id : expr_free_idents(e))
    if (std::find(coords.begin(), coords.end(), id) == coords.end())
      throw std::invalid_argument("unknown identifier '" + id + "' (coordinates: " +
                                  [&] {
                                    std::string s;
                                    for (const auto& c : coords) s += c + " ";
                                    return s;
                                  }() +
                                  ")");
  return [e, coords](const Vec& y) {
    std::map<std::string, double> env;
    for (size_t i = 0; i < coords.size() && i < y.size(); ++i) env[coords[i]] = y[i];
    return expr_eval(e, env);
  };
}

}  // namespace symcov
