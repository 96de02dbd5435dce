#include "lvlab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <vector>

namespace lvlab {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : InvalidArgument("parse error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

enum class Op { Number, VarX, VarT, Neg, Add, Sub, Mul, Div, Pow, Cos, Sin, Exp, Abs };

struct Expr::Node {
  Op op;
  double value = 0.0;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;
};

namespace {

using NodePtr = std::unique_ptr<Expr::Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_unique<Expr::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  NodePtr parse_all() {
    NodePtr e = expression(0, 0);
    if (cur_.kind != Tok::End) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur_.offset); }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_ = Token{Tok::End, pos_, {}};
    if (pos_ >= src_.size()) return;
    const char c = src_[pos_];
    const std::size_t start = pos_;
    auto single = [&](Tok k) {
      ++pos_;
      cur_ = Token{k, start, src_.substr(start, 1)};
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    auto is_digit = [&](std::size_t i) {
      return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
    };
    if (is_digit(pos_) || (c == '.' && is_digit(pos_ + 1))) {
      while (is_digit(pos_)) ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        while (is_digit(pos_)) ++pos_;
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (!is_digit(p)) throw ParseError("malformed exponent", pos_);
        pos_ = p;
        while (is_digit(pos_)) ++pos_;
      }
      const std::string_view text = src_.substr(start, pos_ - start);
      double v = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ParseError("numeric literal out of range", start);
      }
      cur_ = Token{Tok::Number, start, text, v};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      cur_ = Token{Tok::Ident, start, src_.substr(start, pos_ - start)};
      return;
    }
    throw ParseError("unexpected character", start);
  }

  static int left_power(Tok k) {
    switch (k) {
      case Tok::Plus:
      case Tok::Minus: return 10;
      case Tok::Star:
      case Tok::Slash: return 20;
      case Tok::Caret: return 30;
      default: return -1;
    }
  }

  NodePtr expression(int min_power, int depth) {
    if (depth > kMaxDepth) fail("expression nested too deeply");
    NodePtr lhs = prefix(depth);
    for (;;) {
      const Tok k = cur_.kind;
      const int lp = left_power(k);
      if (lp < 0 || lp < min_power) break;
      advance();
      // ^ is right-associative: its right operand binds at the same power.
      const int rp = (k == Tok::Caret) ? lp : lp + 1;
      NodePtr rhs = expression(rp, depth + 1);
      Op op = Op::Add;
      switch (k) {
        case Tok::Plus: op = Op::Add; break;
        case Tok::Minus: op = Op::Sub; break;
        case Tok::Star: op = Op::Mul; break;
        case Tok::Slash: op = Op::Div; break;
        default: op = Op::Pow; break;
      }
      lhs = make(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr prefix(int depth) {
    if (depth > kMaxDepth) fail("expression nested too deeply");
    switch (cur_.kind) {
      case Tok::Number: {
        auto n = make(Op::Number);
        n->value = cur_.number;
        advance();
        return n;
      }
      case Tok::Minus: {
        advance();
        // Binds tighter than * / but looser than ^, so -2^2 == -(2^2).
        return make(Op::Neg, expression(25, depth + 1));
      }
      case Tok::LParen: {
        advance();
        NodePtr inner = expression(0, depth + 1);
        if (cur_.kind != Tok::RParen) fail("expected ')'");
        advance();
        return inner;
      }
      case Tok::Ident: return identifier(depth);
      case Tok::End: fail("unexpected end of input, expected an expression");
      default: fail("expected an expression");
    }
  }

  NodePtr identifier(int depth) {
    const Token tok = cur_;
    if (tok.text == "x" || tok.text == "t") {
      advance();
      return make(tok.text == "x" ? Op::VarX : Op::VarT);
    }
    std::optional<Op> fn;
    if (tok.text == "cos") fn = Op::Cos;
    if (tok.text == "sin") fn = Op::Sin;
    if (tok.text == "exp") fn = Op::Exp;
    if (tok.text == "abs") fn = Op::Abs;
    if (!fn) throw ParseError("unknown identifier '" + std::string(tok.text) + "'", tok.offset);
    advance();
    if (cur_.kind != Tok::LParen) fail("expected '(' after function name");
    advance();
    NodePtr arg = expression(0, depth + 1);
    if (cur_.kind != Tok::RParen) fail("expected ')'");
    advance();
    return make(*fn, std::move(arg));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token cur_{Tok::End, 0, {}};
};

double checked(double v) {
  if (!std::isfinite(v)) throw DomainError("expression evaluates to a non-finite value");
  return v;
}

double evaluate(const Expr::Node& n, double x, double t) {
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::VarX: return x;
    case Op::VarT: return t;
    case Op::Neg: return -evaluate(*n.lhs, x, t);
    case Op::Add: return checked(evaluate(*n.lhs, x, t) + evaluate(*n.rhs, x, t));
    case Op::Sub: return checked(evaluate(*n.lhs, x, t) - evaluate(*n.rhs, x, t));
    case Op::Mul: return checked(evaluate(*n.lhs, x, t) * evaluate(*n.rhs, x, t));
    case Op::Div: {
      const double num = evaluate(*n.lhs, x, t);
      const double den = evaluate(*n.rhs, x, t);
      if (den == 0.0) throw DomainError("division by zero");
      return checked(num / den);
    }
    case Op::Pow: return checked(std::pow(evaluate(*n.lhs, x, t), evaluate(*n.rhs, x, t)));
    case Op::Cos: return checked(std::cos(evaluate(*n.lhs, x, t)));
    case Op::Sin: return checked(std::sin(evaluate(*n.lhs, x, t)));
    case Op::Exp: return checked(std::exp(evaluate(*n.lhs, x, t)));
    case Op::Abs: return std::abs(evaluate(*n.lhs, x, t));
  }
  throw InternalError("unknown expression node");
}

void print(const Expr::Node& n, std::string& out) {
  auto binary = [&](const char* sym) {
    out += '(';
    print(*n.lhs, out);
    out += sym;
    print(*n.rhs, out);
    out += ')';
  };
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    print(*n.lhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Op::VarX: out += 'x'; return;
    case Op::VarT: out += 't'; return;
    case Op::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      return;
    case Op::Add: return binary(" + ");
    case Op::Sub: return binary(" - ");
    case Op::Mul: return binary(" * ");
    case Op::Div: return binary(" / ");
    case Op::Pow: return binary("^");
    case Op::Cos: return call("cos");
    case Op::Sin: return call("sin");
    case Op::Exp: return call("exp");
    case Op::Abs: return call("abs");
  }
}

}  // namespace

Expr parse(std::string_view text) {
  Parser p(text);
  return Expr(std::shared_ptr<const Expr::Node>(p.parse_all()));
}

double Expr::eval(double x, double t) const { return evaluate(*root_, x, t); }

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

Field sample(const Expr& e, const Grid& g, double t) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    try {
      v[j] = e.eval(g.node(j), t);
    } catch (const DomainError& err) {
      throw DomainError("at node " + std::to_string(j) + ": " + err.what());
    }
  }
  return Field(g, std::move(v));
}

}  // namespace lvlab
