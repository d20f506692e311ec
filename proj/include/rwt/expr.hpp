#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rwt {

enum class NodeKind { kConst, kVar, kAdd, kMul, kDiv, kPow, kNeg, kCos, kTan, kTanh, kExp, kLog };

// Immutable expression tree with shared subtrees. Subtraction is represented
// as add(a, neg(b)). Constants keep the decimal text they were written with.
class Expr {
 public:
  struct Node {
    NodeKind kind = NodeKind::kConst;
    double value = 0.0;     // kConst
    std::string text;       // kConst: source spelling
    int index = 0;          // kVar: 1-based variable index; kPow: integer exponent
    std::vector<Expr> children;
  };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double value);
  // Throws ParseError when `text` is not a plain decimal literal.
  static Expr constant_text(std::string text);
  static Expr variable(int index);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b) { return add(std::move(a), neg(std::move(b))); }
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr base, int exponent);
  static Expr neg(Expr a);
  static Expr call(NodeKind fn, Expr arg);

  NodeKind kind() const { return node_->kind; }
  double value() const { return node_->value; }
  const std::string& text() const { return node_->text; }
  int index() const { return node_->index; }
  int exponent() const { return node_->index; }
  std::size_t arity() const { return node_->children.size(); }
  const Expr& child(std::size_t i) const { return node_->children[i]; }

  bool is_constant() const { return kind() == NodeKind::kConst; }

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Node node);

  std::shared_ptr<const Node> node_;
};

inline constexpr int kMaxVariables = 10;

// Grammar (whitespace-insensitive):
//   expr    := term (("+" | "-") term)*
//   term    := unary (("*" | "/") unary)*
//   unary   := "-" unary | power
//   power   := primary ("^" ["-"] integer)?
//   primary := number | "x" digits | name "(" expr ")" | "(" expr ")"
// Unary minus binds tighter than * and / but looser than ^, so -x^2 = -(x^2).
// Throws ParseError (kParseError, kUnknownFunction, kBadVariableIndex) with
// the 0-based offset of the offending token.
Expr parse_expression(std::string_view text, int max_variable = kMaxVariables);

// Canonical text with minimal parentheses; parse(print(e)) prints identically.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);
std::size_t node_count(const Expr& e);
// Highest variable index referenced, 0 for none.
int max_variable(const Expr& e);
// Sorted distinct variable indices.
std::vector<int> variables(const Expr& e);

inline constexpr double kPoleThreshold = 1e-12;

struct EvalResult {
  double value = 0.0;
  bool out_of_domain = false;       // some referenced x outside [0, 1]
  double min_abs_denominator = 0.0; // smallest |divisor| met, +inf if none
};

// x[i] binds variable i+1. Throws Error(kUnboundVariable) when x is too short,
// Error(kPoleError) when a divisor (or cos of a tan argument) has magnitude
// below kPoleThreshold, Error(kDomainError) for log of a non-positive value.
EvalResult evaluate_checked(const Expr& e, std::span<const double> x);
double evaluate(const Expr& e, std::span<const double> x);

// Partial derivative with respect to variable `index` (1-based), computed by
// forward-mode structural differentiation. Same errors as evaluate.
double partial(const Expr& e, int index, std::span<const double> x);

// Constant folding, double negation removal, distribution of constant factors
// over sums and collection of like terms. Linear terms c*xi are ordered by
// variable index, other terms keep their first appearance, the constant last.
Expr simplify(const Expr& e);

std::string_view function_name(NodeKind fn);

}  // namespace rwt
