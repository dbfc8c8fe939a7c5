#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptspec/errors.hpp"

// Arithmetic expressions for potentials V(x), W(x) in one or two variables.
// Grammar: + - * / ^ (integer exponents >= 0), unary minus, parentheses,
// and the functions exp, tanh, sin, cos, sqrt, abs. Variables are x (1D)
// or x1, x2 (2D).

namespace ptspec::expr {

enum class TokenKind {
  Number,
  Identifier,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  LParen,
  RParen,
  Comma,
};

struct Token {
  TokenKind kind;
  std::size_t begin = 0;  // character range [begin, end)
  std::size_t end = 0;
  double value = 0.0;     // Number
  std::string text;       // Identifier
};

std::vector<Token> tokenize(std::string_view source);

enum class NodeKind { Constant, Variable, Negate, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Builtin { Exp, Tanh, Sin, Cos, Sqrt, Abs };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double constant = 0.0;       // Constant
  int variable = 0;            // Variable: 0-based coordinate index
  BinaryOp op = BinaryOp::Add; // Binary
  Builtin fn = Builtin::Exp;   // Call
  NodePtr left, right;         // Binary; Negate and Call use left only
};

// Immutable expression value. Cheap to copy; safe to evaluate concurrently.
class Expr {
 public:
  Expr() = default;

  // tokenize + parse; `dimension` bounds the variable indices allowed.
  static Expr parse(std::string_view source, int dimension);
  static Expr parse(const std::vector<Token>& tokens, int dimension);
  static Expr constant(double value);

  double evaluate(std::span<const double> point) const;
  double operator()(double x) const { return evaluate({&x, 1}); }
  double operator()(double x1, double x2) const {
    const double p[2] = {x1, x2};
    return evaluate({p, 2});
  }

  // Fully parenthesized form; re-parses to a structurally identical tree.
  std::string str() const;

  int dimension() const { return dimension_; }
  bool empty() const { return root_ == nullptr; }
  const NodePtr& root() const { return root_; }

  friend bool structurally_equal(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
  int dimension_ = 0;
};

enum class Parity { Even, Odd, Neither };

std::string to_string(Parity p);

// Classify f under the reflection x_i -> sign_i * x_i by evaluating at
// pseudo-random sample points. Returns Even/Odd only when the relation
// holds to relative tolerance 1e-12 at every sample. The zero function
// satisfies both relations and is reported Even by convention.
Parity detect_parity(const Expr& f, std::span<const int> reflection_signs,
                     int sample_count = 64, std::uint64_t seed = 0x5eedf00d);

}  // namespace ptspec::expr
