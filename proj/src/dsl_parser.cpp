#include <cctype>

#include "expd/dsl.hpp"
#include "expd/errors.hpp"

namespace expd {
namespace dsl {

Node Node::clone() const {
  Node n;
  n.kind = kind;
  n.var = var;
  n.value = value;
  n.exponent = exponent;
  if (lhs) n.lhs = std::make_unique<Node>(lhs->clone());
  if (rhs) n.rhs = std::make_unique<Node>(rhs->clone());
  return n;
}

bool Node::uses(char v) const {
  if (kind == NodeKind::Var) return var == v;
  return (lhs && lhs->uses(v)) || (rhs && rhs->uses(v));
}

bool operator==(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Var:
      return a.var == b.var;
    case NodeKind::Int:
      return a.value == b.value;
    case NodeKind::Pow:
      return a.exponent == b.exponent && *a.lhs == *b.lhs;
    default:
      return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
  }
}

namespace {

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub:
      return 1;
    case NodeKind::Mul:
      return 2;
    case NodeKind::Pow:
      return 3;
    default:
      return 4;
  }
}

void print_into(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(child, out);
  if (parens) out += ')';
}

void print_into(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Var:
      out += n.var;
      return;
    case NodeKind::Int:
      out += n.value.str();
      return;
    case NodeKind::Pow:
      print_child(*n.lhs, precedence(n.lhs->kind) < 4, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    default: {
      const int p = precedence(n.kind);
      // Operators are left-associative: a right operand of equal precedence
      // needs parentheses to survive a reparse.
      print_child(*n.lhs, precedence(n.lhs->kind) < p, out);
      out += n.kind == NodeKind::Add ? " + " : n.kind == NodeKind::Sub ? " - " : " * ";
      print_child(*n.rhs, precedence(n.rhs->kind) <= p, out);
    }
  }
}

Node make_binary(NodeKind k, Node l, Node r) {
  Node n;
  n.kind = k;
  n.lhs = std::make_unique<Node>(std::move(l));
  n.rhs = std::make_unique<Node>(std::move(r));
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view vars) : text_(text), vars_(vars) {}

  RelationExpr parse_expr() {
    Node lhs = parse_poly();
    skip_ws();
    if (!eat('=')) fail("expected '='");
    Node rhs = parse_poly();
    std::optional<BigInt> modulus;
    skip_ws();
    if (at_keyword("mod")) {
      advance(3);
      skip_ws();
      if (peek() == '-') fail("modulus must be an integer >= 2");
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected modulus after 'mod'");
      BigInt m = parse_uint();
      if (m < 2) fail("modulus must be an integer >= 2");
      modulus = std::move(m);
    }
    skip_ws();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return RelationExpr(std::move(lhs), std::move(rhs), std::move(modulus));
  }

 private:
  Node parse_poly() {
    Node acc = parse_term();
    while (true) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') return acc;
      advance(1);
      acc = make_binary(c == '+' ? NodeKind::Add : NodeKind::Sub, std::move(acc), parse_term());
    }
  }

  Node parse_term() {
    Node acc = parse_factor();
    while (true) {
      skip_ws();
      if (peek() != '*') return acc;
      advance(1);
      acc = make_binary(NodeKind::Mul, std::move(acc), parse_factor());
    }
  }

  Node parse_factor() {
    Node base = parse_atom();
    skip_ws();
    if (peek() != '^') return base;
    advance(1);
    skip_ws();
    if (peek() == '-') fail("negative exponent");
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent after '^'");
    BigInt e = parse_uint();
    if (e > 1'000'000) fail("exponent too large");
    Node n;
    n.kind = NodeKind::Pow;
    n.exponent = e.convert_to<std::uint32_t>();
    n.lhs = std::make_unique<Node>(std::move(base));
    return n;
  }

  Node parse_atom() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      advance(1);
      Node inner = parse_poly();
      skip_ws();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Node n;
      n.kind = NodeKind::Int;
      n.value = parse_uint();
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (at_keyword("mod")) fail("expected operand before 'mod'");
      std::size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek()))) advance(1);
      std::string_view name = text_.substr(start, pos_ - start);
      if (name.size() != 1 || vars_.find(name[0]) == std::string_view::npos) {
        pos_ = start;
        fail("unknown variable '" + std::string(name) + "' (declared: " + std::string(vars_) + ")");
      }
      Node n;
      n.kind = NodeKind::Var;
      n.var = name[0];
      return n;
    }
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected '") + c + "'");
  }

  BigInt parse_uint() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance(1);
    return BigInt(std::string(text_.substr(start, pos_ - start)));
  }

  bool at_keyword(std::string_view kw) const {
    if (text_.substr(pos_, kw.size()) != kw) return false;
    std::size_t end = pos_ + kw.size();
    return end == text_.size() || !std::isalnum(static_cast<unsigned char>(text_[end]));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance(1);
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool eat(char c) {
    if (peek() != c) return false;
    advance(1);
    return true;
  }
  void advance(std::size_t k) { pos_ += k; }

  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(msg, line, col);
  }

  std::string_view text_;
  std::string_view vars_;
  std::size_t pos_ = 0;
};

}  // namespace

}  // namespace dsl

std::string print(const dsl::Node& node) {
  std::string out;
  dsl::print_into(node, out);
  return out;
}

RelationExpr::RelationExpr(dsl::Node lhs, dsl::Node rhs, std::optional<BigInt> modulus)
    : lhs_(std::make_unique<dsl::Node>(std::move(lhs))),
      rhs_(std::make_unique<dsl::Node>(std::move(rhs))),
      modulus_(std::move(modulus)) {}

RelationExpr::RelationExpr(const RelationExpr& other)
    : lhs_(std::make_unique<dsl::Node>(other.lhs_->clone())),
      rhs_(std::make_unique<dsl::Node>(other.rhs_->clone())),
      modulus_(other.modulus_) {}

RelationExpr& RelationExpr::operator=(const RelationExpr& other) {
  if (this != &other) *this = RelationExpr(other);
  return *this;
}

std::string RelationExpr::print() const {
  std::string out = expd::print(*lhs_) + " = " + expd::print(*rhs_);
  if (modulus_) out += " mod " + modulus_->str();
  return out;
}

bool operator==(const RelationExpr& a, const RelationExpr& b) {
  return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_ && a.modulus_ == b.modulus_;
}

RelationExpr parse(std::string_view text, std::string_view variables) {
  return dsl::Parser(text, variables).parse_expr();
}

}  // namespace expd
