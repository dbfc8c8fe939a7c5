#include "ptspec/expr.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace ptspec::expr {

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.begin = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < n && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.'))
        ++j;
      // exponent suffix: 1e-3, 2.5E+7
      if (j < n && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) {
          ++k;
          while (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      const std::string text(src.substr(i, j - i));
      try {
        std::size_t used = 0;
        t.value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        throw LexError(i, c);
      }
      t.kind = TokenKind::Number;
      t.end = j;
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      t.kind = TokenKind::Identifier;
      t.text = std::string(src.substr(i, j - i));
      t.end = j;
      i = j;
    } else {
      switch (c) {
        case '+': t.kind = TokenKind::Plus; break;
        case '-': t.kind = TokenKind::Minus; break;
        case '*': t.kind = TokenKind::Star; break;
        case '/': t.kind = TokenKind::Slash; break;
        case '^': t.kind = TokenKind::Caret; break;
        case '(': t.kind = TokenKind::LParen; break;
        case ')': t.kind = TokenKind::RParen; break;
        case ',': t.kind = TokenKind::Comma; break;
        default: throw LexError(i, c);
      }
      t.end = ++i;
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->constant = v;
  return n;
}

bool is_constant_tree(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::Constant: return true;
    case NodeKind::Variable: return false;
    case NodeKind::Negate: return is_constant_tree(n->left);
    case NodeKind::Call: return is_constant_tree(n->left);
    case NodeKind::Binary:
      return is_constant_tree(n->left) && is_constant_tree(n->right);
  }
  return false;
}

double eval_node(const Node& n, std::span<const double> x);

// Precedence-climbing (Pratt) parser.
//   level 1: + -            (left)
//   level 2: * /            (left)
//   level 3: unary minus
//   level 4: ^              (right, integer constant exponents >= 0)
class Parser {
 public:
  Parser(const std::vector<Token>& toks, int dim) : toks_(toks), dim_(dim) {}

  NodePtr parse_all() {
    NodePtr e = parse_expression(1);
    if (pos_ != toks_.size())
      throw ParseError(toks_[pos_].begin, "end of input");
    return e;
  }

 private:
  const std::vector<Token>& toks_;
  int dim_;
  std::size_t pos_ = 0;

  const Token* peek() const { return pos_ < toks_.size() ? &toks_[pos_] : nullptr; }

  std::size_t here() const {
    return pos_ < toks_.size() ? toks_[pos_].begin
                               : (toks_.empty() ? 0 : toks_.back().end);
  }

  NodePtr parse_expression(int min_level) {
    NodePtr lhs = parse_prefix(min_level);
    for (;;) {
      const Token* t = peek();
      if (!t) break;
      int level;
      BinaryOp op;
      switch (t->kind) {
        case TokenKind::Plus: level = 1; op = BinaryOp::Add; break;
        case TokenKind::Minus: level = 1; op = BinaryOp::Sub; break;
        case TokenKind::Star: level = 2; op = BinaryOp::Mul; break;
        case TokenKind::Slash: level = 2; op = BinaryOp::Div; break;
        case TokenKind::Caret: level = 4; op = BinaryOp::Pow; break;
        default: return lhs;
      }
      if (level < min_level) return lhs;
      ++pos_;
      // '^' is right-associative, the rest left-associative
      NodePtr rhs = parse_expression(op == BinaryOp::Pow ? level : level + 1);
      lhs = make_binary(op, lhs, rhs, t->begin);
    }
    return lhs;
  }

  NodePtr parse_prefix(int min_level) {
    const Token* t = peek();
    if (!t) throw ParseError(here(), "an operand");
    if (t->kind == TokenKind::Minus) {
      ++pos_;
      // unary minus binds looser than '^': -x^2 == -(x^2)
      NodePtr child = parse_expression(3 < min_level ? min_level : 3);
      if (child->kind == NodeKind::Constant)
        return make_constant(-child->constant);  // canonical signed constant
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Negate;
      n->left = child;
      return n;
    }
    return parse_atom();
  }

  NodePtr parse_atom() {
    const Token* t = peek();
    if (!t) throw ParseError(here(), "an operand");
    switch (t->kind) {
      case TokenKind::Number: {
        ++pos_;
        return make_constant(t->value);
      }
      case TokenKind::LParen: {
        ++pos_;
        NodePtr e = parse_expression(1);
        expect(TokenKind::RParen, "')'");
        return e;
      }
      case TokenKind::Identifier: {
        ++pos_;
        if (peek() && peek()->kind == TokenKind::LParen) return parse_call(*t);
        return make_variable(*t);
      }
      default:
        throw ParseError(t->begin, "an operand");
    }
  }

  NodePtr make_variable(const Token& t) {
    int index = -1;
    if (t.text == "x") index = 0;
    else if (t.text == "x1") index = 0;
    else if (t.text == "x2") index = 1;
    if (index < 0) throw ParseError(t.begin, "a variable or function name");
    if (t.text == "x" && dim_ != 1)
      throw ParseError(t.begin, "x1/x2 in a 2-dimensional expression");
    if (index >= dim_)
      throw ParseError(t.begin, "a variable index within dimension " + std::to_string(dim_));
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    n->variable = index;
    return n;
  }

  NodePtr parse_call(const Token& name) {
    Builtin fn;
    if (name.text == "exp") fn = Builtin::Exp;
    else if (name.text == "tanh") fn = Builtin::Tanh;
    else if (name.text == "sin") fn = Builtin::Sin;
    else if (name.text == "cos") fn = Builtin::Cos;
    else if (name.text == "sqrt") fn = Builtin::Sqrt;
    else if (name.text == "abs") fn = Builtin::Abs;
    else throw ParseError(name.begin, "a known function (exp, tanh, sin, cos, sqrt, abs)");
    expect(TokenKind::LParen, "'('");
    NodePtr arg = parse_expression(1);
    expect(TokenKind::RParen, "')'");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->fn = fn;
    n->left = arg;
    return n;
  }

  NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs, std::size_t at) {
    if (op == BinaryOp::Pow) {
      // exponents must reduce to integer constants >= 0
      if (!is_constant_tree(rhs))
        throw ParseError(at, "a constant integer exponent");
      double v;
      try {
        v = eval_node(*rhs, {});
      } catch (const EvalError&) {
        throw ParseError(at, "a finite constant exponent");
      }
      if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
        throw ParseError(at, "an integer exponent >= 0");
      rhs = make_constant(v);
      if (is_constant_tree(lhs))
        return make_constant(eval_node(Node{NodeKind::Binary, 0, 0, BinaryOp::Pow,
                                            Builtin::Exp, lhs, rhs},
                                       {}));
    }
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->op = op;
    n->left = std::move(lhs);
    n->right = std::move(rhs);
    return n;
  }

  void expect(TokenKind k, const char* what) {
    const Token* t = peek();
    if (!t || t->kind != k) throw ParseError(here(), what);
    ++pos_;
  }
};

double eval_node(const Node& n, std::span<const double> x) {
  switch (n.kind) {
    case NodeKind::Constant:
      return n.constant;
    case NodeKind::Variable:
      if (n.variable >= static_cast<int>(x.size()))
        throw EvalError("point dimension smaller than variable index");
      return x[static_cast<std::size_t>(n.variable)];
    case NodeKind::Negate:
      return -eval_node(*n.left, x);
    case NodeKind::Call: {
      const double a = eval_node(*n.left, x);
      switch (n.fn) {
        case Builtin::Exp: return std::exp(a);
        case Builtin::Tanh: return std::tanh(a);
        case Builtin::Sin: return std::sin(a);
        case Builtin::Cos: return std::cos(a);
        case Builtin::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of negative value");
          return std::sqrt(a);
        case Builtin::Abs: return std::fabs(a);
      }
      throw EvalError("unknown function");
    }
    case NodeKind::Binary: {
      const double a = eval_node(*n.left, x);
      if (n.op == BinaryOp::Pow) {
        // exponent is an integer constant by construction
        auto e = static_cast<long long>(n.right->constant);
        double base = a, acc = 1.0;
        for (; e > 0; e >>= 1) {
          if (e & 1) acc *= base;
          base *= base;
        }
        return acc;
      }
      const double b = eval_node(*n.right, x);
      switch (n.op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (b == 0.0) throw EvalError("division by zero");
          return a / b;
        default: break;
      }
      throw EvalError("unknown operator");
    }
  }
  throw EvalError("malformed expression node");
}

int max_variable(const NodePtr& n) {
  if (!n) return -1;
  switch (n->kind) {
    case NodeKind::Variable: return n->variable;
    case NodeKind::Constant: return -1;
    default:
      return std::max(max_variable(n->left), max_variable(n->right));
  }
}

void print_node(const Node& n, std::ostream& os) {
  switch (n.kind) {
    case NodeKind::Constant: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.constant;
      std::string s = tmp.str();
      if (n.constant < 0) os << "(" << s << ")";
      else os << s;
      return;
    }
    case NodeKind::Variable:
      os << (n.variable == 0 ? "x1" : "x2");
      return;
    case NodeKind::Negate:
      os << "(-";
      print_node(*n.left, os);
      os << ")";
      return;
    case NodeKind::Call: {
      const char* name = nullptr;
      switch (n.fn) {
        case Builtin::Exp: name = "exp"; break;
        case Builtin::Tanh: name = "tanh"; break;
        case Builtin::Sin: name = "sin"; break;
        case Builtin::Cos: name = "cos"; break;
        case Builtin::Sqrt: name = "sqrt"; break;
        case Builtin::Abs: name = "abs"; break;
      }
      os << name << "(";
      print_node(*n.left, os);
      os << ")";
      return;
    }
    case NodeKind::Binary: {
      const char* sym = nullptr;
      switch (n.op) {
        case BinaryOp::Add: sym = "+"; break;
        case BinaryOp::Sub: sym = "-"; break;
        case BinaryOp::Mul: sym = "*"; break;
        case BinaryOp::Div: sym = "/"; break;
        case BinaryOp::Pow: sym = "^"; break;
      }
      os << "(";
      print_node(*n.left, os);
      os << sym;
      print_node(*n.right, os);
      os << ")";
      return;
    }
  }
}

bool nodes_equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Constant: return a->constant == b->constant;
    case NodeKind::Variable: return a->variable == b->variable;
    case NodeKind::Negate: return nodes_equal(a->left, b->left);
    case NodeKind::Call:
      return a->fn == b->fn && nodes_equal(a->left, b->left);
    case NodeKind::Binary:
      return a->op == b->op && nodes_equal(a->left, b->left) &&
             nodes_equal(a->right, b->right);
  }
  return false;
}

}  // namespace

Expr Expr::parse(std::string_view source, int dimension) {
  if (source.empty()) throw ParseError(0, "a non-empty expression");
  return parse(tokenize(source), dimension);
}

Expr Expr::parse(const std::vector<Token>& tokens, int dimension) {
  if (dimension != 1 && dimension != 2)
    throw ParseError(0, "dimension 1 or 2");
  Parser p(tokens, dimension);
  Expr e;
  e.root_ = p.parse_all();
  e.dimension_ = dimension;
  return e;
}

Expr Expr::constant(double value) {
  Expr e;
  e.root_ = make_constant(value);
  e.dimension_ = 1;
  return e;
}

double Expr::evaluate(std::span<const double> point) const {
  if (!root_) throw EvalError("empty expression");
  if (max_variable(root_) >= static_cast<int>(point.size()))
    throw EvalError("point dimension smaller than expression dimension");
  const double v = eval_node(*root_, point);
  if (!std::isfinite(v)) throw EvalError("non-finite result");
  return v;
}

std::string Expr::str() const {
  if (!root_) return "";
  std::ostringstream os;
  print_node(*root_, os);
  return os.str();
}

bool structurally_equal(const Expr& a, const Expr& b) {
  return nodes_equal(a.root_, b.root_);
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Neither: return "neither";
  }
  return "neither";
}

Parity detect_parity(const Expr& f, std::span<const int> reflection_signs,
                     int sample_count, std::uint64_t seed) {
  if (sample_count < 32) sample_count = 32;
  const std::size_t dim = reflection_signs.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);

  bool even_ok = true, odd_ok = true;
  constexpr double rel_tol = 1e-12;
  for (int s = 0; s < sample_count && (even_ok || odd_ok); ++s) {
    double x[2] = {0, 0}, xr[2] = {0, 0};
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = dist(rng);
      xr[i] = reflection_signs[i] < 0 ? -x[i] : x[i];
    }
    double fx, fr;
    try {
      fx = f.evaluate({x, dim});
      fr = f.evaluate({xr, dim});
    } catch (const EvalError&) {
      return Parity::Neither;
    }
    const double scale = std::max({std::fabs(fx), std::fabs(fr),
                                   std::numeric_limits<double>::min()});
    if (std::fabs(fr - fx) > rel_tol * scale) even_ok = false;
    if (std::fabs(fr + fx) > rel_tol * scale) odd_ok = false;
  }
  // the zero function passes both tests; report Even
  if (even_ok) return Parity::Even;
  if (odd_ok) return Parity::Odd;
  return Parity::Neither;
}

}  // namespace ptspec::expr
