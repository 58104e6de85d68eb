#pragma once

#include <string>
#include <vector>

namespace hoif {

// Variable slots understood by the expression language. theta is also
// accepted as t.
enum class Var { X = 0, Y = 1, Theta = 2, Kappa = 3 };

template <class T>
struct Vars {
  T x{}, y{}, theta{}, kappa{};
};

// Small arithmetic-expression language compiled to a postfix program:
//   numbers, x y theta(t) kappa, pi e, + - * / ^, unary minus, and the
//   functions sin cos tan exp log sqrt abs atan sinh cosh atan2 pow min max.
// The source text is kept so that a parsed expression serializes to exactly
// what it was parsed from. The literal "auto" is accepted and marks a field
// that the problem layer derives from an exact solution.
class Expr {
 public:
  Expr() : Expr(parse("0")) {}
  static Expr parse(const std::string& source);
  static Expr constant(double c);

  const std::string& source() const { return source_; }
  bool is_auto() const { return auto_; }
  bool uses(Var v) const { return (used_ >> static_cast<int>(v)) & 1u; }

  // Supported T: double, Dual2, Taylor2, Series1.
  template <class T>
  T eval(const Vars<T>& v) const;

  double operator()(double x, double y, double theta = 0.0, double kappa = 0.0) const {
    return eval<double>(Vars<double>{x, y, theta, kappa});
  }

  enum class Op : unsigned char {
    Const, Var, Add, Sub, Mul, Div, Neg, Pow, PowC, IPow,
    Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Atan, Sinh, Cosh,
    Atan2, Pow2, Min, Max
  };
  struct Instr {
    Op op;
    int arg = 0;       // variable slot or integer exponent
    double value = 0;  // constant
  };

 private:
  struct RawTag {};
  explicit Expr(RawTag) {}

  std::string source_;
  std::vector<Instr> code_;
  int max_depth_ = 1;
  unsigned used_ = 0;
  bool auto_ = false;
};

}  // namespace hoif
