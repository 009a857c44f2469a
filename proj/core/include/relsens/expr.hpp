#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relsens {

/// Reserved identifier for the design parameter.
inline constexpr std::string_view kDesignSymbol = "a";

enum class Func { Ln, Exp, Sqrt, Abs, Min, Max };

std::string_view to_string(Func f) noexcept;

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { Constant, Variable, Negate, Binary, Call };

  Kind kind = Kind::Constant;
  double value = 0.0;      // Constant
  std::string name;        // Variable
  char op = 0;             // Binary: one of + - * / ^
  Func func = Func::Ln;    // Call
  std::vector<ExprPtr> args;
};

bool operator==(const ExprNode& a, const ExprNode& b);

/// Immutable arithmetic expression tree.
///
/// Grammar, loosest to tightest: + -, * /, unary -, ^ (right associative),
/// then atoms: numbers, identifiers, calls ln exp sqrt abs (one argument)
/// and min max (two or more), parentheses.
class Expr {
 public:
  static Expr parse(std::string_view text);

  static Expr constant(double v);
  static Expr variable(std::string name);
  static Expr negate(Expr e);
  static Expr binary(char op, Expr lhs, Expr rhs);
  static Expr call(Func f, std::vector<Expr> args);

  const ExprNode& root() const noexcept { return *root_; }
  /// Distinct identifiers in order of first appearance.
  std::vector<std::string> variables() const;
  bool uses(std::string_view name) const;
  /// Minimal-parenthesis rendering that parses back to an equal tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b) { return *a.root_ == *b.root_; }

 private:
  explicit Expr(ExprPtr root) : root_(std::move(root)) {}
  ExprPtr root_;
};

/// Expression compiled against an ordered list of input names; the design
/// symbol, when present, is read from a separate slot.
class BoundExpr {
 public:
  BoundExpr(const Expr& expr, std::span<const std::string> input_names);

  bool has_design_param() const noexcept { return has_design_; }
  std::size_t arity() const noexcept { return names_.size(); }
  const std::string& source() const noexcept { return source_; }

  /// Throws DomainError (ln/sqrt of out-of-range values, division by zero)
  /// or Evaluation (NaN result) with the input values attached.
  double evaluate(std::span<const double> x, double a = 0.0) const;

 private:
  enum class Op : unsigned char { Push, Load, LoadDesign, Neg, Add, Sub, Mul, Div, Pow, Call };
  struct Instr {
    Op op;
    unsigned char argc = 0;
    Func func = Func::Ln;
    std::size_t index = 0;
    double value = 0.0;
  };

  void compile(const ExprNode& node);
  [[noreturn]] void fail_domain(const std::string& what, std::span<const double> x,
                                double a) const;

  std::vector<Instr> code_;
  std::vector<std::string> names_;
  std::string source_;
  bool has_design_ = false;
  std::size_t max_stack_ = 0;
};

}  // namespace relsens
