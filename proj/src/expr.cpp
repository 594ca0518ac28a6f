#include "mollerlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <utility>

namespace mollerlab {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : ConfigError(what + " at byte " + std::to_string(offset)), offset_(offset) {}

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

struct FuncName {
  std::string_view name;
  ExprFunc func;
};

constexpr FuncName kFuncs[] = {
    {"sin", ExprFunc::sin},   {"cos", ExprFunc::cos},   {"tan", ExprFunc::tan},   {"exp", ExprFunc::exp},
    {"log", ExprFunc::log},   {"sqrt", ExprFunc::sqrt}, {"tanh", ExprFunc::tanh},
};

std::string_view func_name(ExprFunc f) {
  for (const auto& e : kFuncs) {
    if (e.func == f) return e.name;
  }
  return "?";
}

NodePtr make(ExprKind kind, std::size_t offset, std::vector<NodePtr> args = {}, double value = 0.0,
             ExprFunc func = ExprFunc::sin) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->offset = offset;
  n->args = std::move(args);
  n->value = value;
  n->func = func;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make(ExprKind::add, at, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(ExprKind::sub, at, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make(ExprKind::mul, at, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(ExprKind::div, at, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) return make(ExprKind::neg, at, {unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip_ws();
    const std::size_t at = pos_;
    if (accept('^')) return make(ExprKind::pow, at, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      const std::string_view id = src_.substr(pos_, end - pos_);
      pos_ = end;
      skip_ws();
      const bool call = pos_ < src_.size() && src_[pos_] == '(';
      for (const auto& f : kFuncs) {
        if (f.name != id) continue;
        if (!call) throw ParseError("function '" + std::string(id) + "' needs exactly one argument", at);
        ++pos_;
        std::vector<NodePtr> args;
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] != ')') {
          args.push_back(expr());
          while (accept(',')) args.push_back(expr());
        }
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        if (args.size() != 1) {
          throw ParseError("function '" + std::string(id) + "' takes 1 argument, got " + std::to_string(args.size()),
                           at);
        }
        return make(ExprKind::call, at, std::move(args), 0.0, f.func);
      }
      if (call) throw ParseError("unknown function '" + std::string(id) + "'", at);
      if (id == "t") return make(ExprKind::var_t, at);
      if (id == "x") return make(ExprKind::var_x, at);
      if (id == "pi") return make(ExprKind::pi, at);
      throw ParseError("unknown identifier '" + std::string(id) + "'", at);
    }
    throw ParseError(std::string("unexpected '") + c + "'", at);
  }

  NodePtr number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    };
    digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      digits();
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
        end = e;
        digits();
      }
    }
    const std::string text(src_.substr(at, end - at));
    char* stop = nullptr;
    const double v = std::strtod(text.c_str(), &stop);
    if (stop != text.c_str() + text.size() || text == ".") throw ParseError("malformed number '" + text + "'", at);
    pos_ = end;
    return make(ExprKind::number, at, {}, v);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

[[noreturn]] void domain_fail(const ExprNode& n, const std::string& what) {
  throw DomainError(what + " at byte " + std::to_string(n.offset));
}

double eval_node(const ExprNode& n, double t, double x) {
  switch (n.kind) {
    case ExprKind::number:
      return n.value;
    case ExprKind::var_t:
      return t;
    case ExprKind::var_x:
      return x;
    case ExprKind::pi:
      return std::numbers::pi;
    case ExprKind::neg:
      return -eval_node(*n.args[0], t, x);
    case ExprKind::add:
      return eval_node(*n.args[0], t, x) + eval_node(*n.args[1], t, x);
    case ExprKind::sub:
      return eval_node(*n.args[0], t, x) - eval_node(*n.args[1], t, x);
    case ExprKind::mul:
      return eval_node(*n.args[0], t, x) * eval_node(*n.args[1], t, x);
    case ExprKind::div: {
      const double d = eval_node(*n.args[1], t, x);
      if (d == 0.0) domain_fail(n, "division by zero");
      return eval_node(*n.args[0], t, x) / d;
    }
    case ExprKind::pow: {
      const double v = std::pow(eval_node(*n.args[0], t, x), eval_node(*n.args[1], t, x));
      if (!std::isfinite(v)) domain_fail(n, "power undefined");
      return v;
    }
    case ExprKind::call: {
      const double a = eval_node(*n.args[0], t, x);
      switch (n.func) {
        case ExprFunc::sin:
          return std::sin(a);
        case ExprFunc::cos:
          return std::cos(a);
        case ExprFunc::tan:
          return std::tan(a);
        case ExprFunc::exp: {
          const double v = std::exp(a);
          if (!std::isfinite(v)) domain_fail(n, "exp overflow");
          return v;
        }
        case ExprFunc::log:
          if (!(a > 0.0)) domain_fail(n, "log of non-positive value");
          return std::log(a);
        case ExprFunc::sqrt:
          if (a < 0.0) domain_fail(n, "sqrt of negative value");
          return std::sqrt(a);
        case ExprFunc::tanh:
          return std::tanh(a);
      }
    }
  }
  return 0.0;
}

void print_node(const ExprNode& n, std::string& out) {
  auto bin = [&](const char* op) {
    out += '(';
    print_node(*n.args[0], out);
    out += op;
    print_node(*n.args[1], out);
    out += ')';
  };
  switch (n.kind) {
    case ExprKind::number: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case ExprKind::var_t:
      out += 't';
      return;
    case ExprKind::var_x:
      out += 'x';
      return;
    case ExprKind::pi:
      out += "pi";
      return;
    case ExprKind::neg:
      out += "(-";
      print_node(*n.args[0], out);
      out += ')';
      return;
    case ExprKind::add:
      return bin("+");
    case ExprKind::sub:
      return bin("-");
    case ExprKind::mul:
      return bin("*");
    case ExprKind::div:
      return bin("/");
    case ExprKind::pow:
      return bin("^");
    case ExprKind::call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.args[0], out);
      out += ')';
      return;
  }
}

bool same(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == ExprKind::number && a.value != b.value) return false;
  if (a.kind == ExprKind::call && a.func != b.func) return false;
  for (std::size_t k = 0; k < a.args.size(); ++k) {
    if (!same(*a.args[k], *b.args[k])) return false;
  }
  return true;
}

bool uses_t(const ExprNode& n) {
  if (n.kind == ExprKind::var_t) return true;
  for (const auto& c : n.args) {
    if (uses_t(*c)) return true;
  }
  return false;
}

}  // namespace

double Expr::eval(double t, double x) const { return eval_node(*root_, t, x); }

std::string Expr::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool Expr::depends_on_t() const { return uses_t(*root_); }

ScalarFn Expr::as_fn() const {
  return [root = root_](double t, double x) { return eval_node(*root, t, x); };
}

bool operator==(const Expr& a, const Expr& b) { return same(*a.root_, *b.root_); }

Expr parse_expr(std::string_view source) { return Expr(Parser(source).parse()); }

}  // namespace mollerlab
