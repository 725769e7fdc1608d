#include "topo/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace topo {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : ValidationError(what + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

using expr::Fn;
using expr::Node;
using expr::Op;
using NodePtr = std::shared_ptr<const Node>;

struct FnInfo {
  std::string_view name;
  Fn fn;
  int arity;
};
constexpr FnInfo kFunctions[] = {
    {"sin", Fn::Sin, 1},   {"cos", Fn::Cos, 1},   {"tan", Fn::Tan, 1}, {"sinh", Fn::Sinh, 1},
    {"cosh", Fn::Cosh, 1}, {"tanh", Fn::Tanh, 1}, {"exp", Fn::Exp, 1}, {"ln", Fn::Ln, 1},
    {"sqrt", Fn::Sqrt, 1}, {"atan2", Fn::Atan2, 2},
};

const FnInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      while (i < s.size() && is_digit(s[i])) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j >= s.size() || !is_digit(s[j])) throw ParseError("malformed exponent", j);
        while (j < s.size() && is_digit(s[j])) ++j;
        i = j;
      }
      Token t{Tok::Number, start, s.substr(start, i - start)};
      const auto res = std::from_chars(s.data() + start, s.data() + i, t.number);
      if (res.ec != std::errc() || !std::isfinite(t.number)) throw ParseError("number out of range", start);
      out.push_back(t);
      continue;
    }
    if (is_ident_start(c)) {
      while (i < s.size() && (is_ident_start(s[i]) || is_digit(s[i]))) ++i;
      out.push_back({Tok::Ident, start, s.substr(start, i - start)});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({k, start, s.substr(start, 1)});
    ++i;
  }
  out.push_back({Tok::End, s.size(), {}});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars, const std::map<std::string, double>& consts)
      : toks_(lex(text)), vars_(vars), consts_(consts) {}

  NodePtr parse() {
    NodePtr n = expression();
    if (peek().kind != Tok::End) throw ParseError("unexpected '" + std::string(peek().text) + "'", peek().pos);
    return n;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++i_;
    return true;
  }

  static NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expression() {
    NodePtr n = term();
    for (;;) {
      if (accept(Tok::Plus)) n = binary(Op::Add, n, term());
      else if (accept(Tok::Minus)) n = binary(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept(Tok::Star)) n = binary(Op::Mul, n, unary());
      else if (accept(Tok::Slash)) n = binary(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept(Tok::Minus)) {
      auto n = std::make_shared<Node>();
      n->op = Op::Negate;
      n->args = {unary()};
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept(Tok::Caret)) return binary(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Number: {
        auto n = std::make_shared<Node>();
        n->op = Op::Number;
        n->value = t.number;
        return n;
      }
      case Tok::LParen: {
        NodePtr n = expression();
        if (!accept(Tok::RParen)) throw ParseError("expected ')'", peek().pos);
        return n;
      }
      case Tok::Ident: return identifier(t);
      case Tok::End: throw ParseError("unexpected end of input", t.pos);
      default: throw ParseError("unexpected '" + std::string(t.text) + "'", t.pos);
    }
  }

  NodePtr identifier(const Token& t) {
    const std::string name(t.text);
    if (peek().kind == Tok::LParen) {
      const FnInfo* f = find_function(name);
      if (!f) throw ParseError("unknown function '" + name + "'", t.pos);
      next();
      auto n = std::make_shared<Node>();
      n->op = Op::Call;
      n->fn = f->fn;
      n->name = name;
      n->args.push_back(expression());
      while (accept(Tok::Comma)) n->args.push_back(expression());
      if (!accept(Tok::RParen)) throw ParseError("expected ')' or ','", peek().pos);
      if (static_cast<int>(n->args.size()) != f->arity)
        throw ParseError(name + " expects " + std::to_string(f->arity) + " argument(s), got " +
                             std::to_string(n->args.size()),
                         t.pos);
      return n;
    }
    auto n = std::make_shared<Node>();
    n->name = name;
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (vars_[k] == name) {
        n->op = Op::Variable;
        n->index = static_cast<int>(k);
        return n;
      }
    if (const auto it = consts_.find(name); it != consts_.end()) {
      n->op = Op::Constant;
      n->value = it->second;
      return n;
    }
    if (name == "pi") {
      n->op = Op::Constant;
      n->value = std::numbers::pi;
      return n;
    }
    if (find_function(name)) throw ParseError("function '" + name + "' needs arguments", t.pos);
    throw ParseError("unknown identifier '" + name + "'", t.pos);
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const std::vector<std::string>& vars_;
  const std::map<std::string, double>& consts_;
};

double eval(const Node& n, std::span<const double> v) {
  switch (n.op) {
    case Op::Number:
    case Op::Constant: return n.value;
    case Op::Variable: return v[n.index];
    case Op::Negate: return -eval(*n.args[0], v);
    case Op::Add: return eval(*n.args[0], v) + eval(*n.args[1], v);
    case Op::Sub: return eval(*n.args[0], v) - eval(*n.args[1], v);
    case Op::Mul: return eval(*n.args[0], v) * eval(*n.args[1], v);
    case Op::Div: return eval(*n.args[0], v) / eval(*n.args[1], v);
    case Op::Pow: return std::pow(eval(*n.args[0], v), eval(*n.args[1], v));
    case Op::Call: {
      const double a = eval(*n.args[0], v);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Tan: return std::tan(a);
        case Fn::Sinh: return std::sinh(a);
        case Fn::Cosh: return std::cosh(a);
        case Fn::Tanh: return std::tanh(a);
        case Fn::Exp: return std::exp(a);
        case Fn::Ln: return std::log(a);
        case Fn::Sqrt: return std::sqrt(a);
        case Fn::Atan2: return std::atan2(a, eval(*n.args[1], v));
      }
    }
  }
  return 0;
}

// Binding strength for printing: higher binds tighter.
int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Negate: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& c, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(c, out);
  if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::Number: {
      char buf[32];
      const auto r = std::to_chars(buf, buf + sizeof buf, n.value);
      out.append(buf, r.ptr);
      return;
    }
    case Op::Variable:
    case Op::Constant: out += n.name; return;
    case Op::Negate:
      out += '-';
      print_child(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case Op::Call:
      out += n.name;
      out += '(';
      for (std::size_t k = 0; k < n.args.size(); ++k) {
        if (k) out += ", ";
        print_node(*n.args[k], out);
      }
      out += ')';
      return;
    case Op::Pow:
      // The base is a primary; the exponent may be any unary.
      print_child(*n.args[0], precedence(*n.args[0]) <= 4, out);
      out += '^';
      print_child(*n.args[1], precedence(*n.args[1]) < 3, out);
      return;
    default: {
      const int p = precedence(n);
      const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
      print_child(*n.args[0], precedence(*n.args[0]) < p, out);
      out += p == 1 ? std::string(" ") + sym + " " : std::string(1, sym);
      print_child(*n.args[1], precedence(*n.args[1]) <= p, out);
      return;
    }
  }
}

bool equal(const Node& a, const Node& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  switch (a.op) {
    case Op::Number: if (a.value != b.value) return false; break;
    case Op::Variable: if (a.index != b.index) return false; break;
    case Op::Constant: if (a.name != b.name || a.value != b.value) return false; break;
    case Op::Call: if (a.fn != b.fn) return false; break;
    default: break;
  }
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!equal(*a.args[k], *b.args[k])) return false;
  return true;
}

bool has_variable(const Node& n) {
  if (n.op == Op::Variable) return true;
  for (const auto& c : n.args)
    if (has_variable(*c)) return true;
  return false;
}

}  // namespace

double Expression::evaluate(std::span<const double> vars) const { return eval(*root_, vars); }

std::string Expression::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool Expression::is_constant() const { return !has_variable(*root_); }

bool operator==(const Expression& a, const Expression& b) {
  if (!a.root_ || !b.root_) return a.root_ == b.root_;
  return equal(*a.root_, *b.root_);
}

Expression parse_expression(std::string_view text, const std::vector<std::string>& variables,
                            const std::map<std::string, double>& constants) {
  Parser p(text, variables, constants);
  return Expression(p.parse());
}

}  // namespace topo
