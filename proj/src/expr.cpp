#include "hoif/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hoif/dual.hpp"
#include "hoif/taylor.hpp"

namespace hoif {

namespace {

using Op = Expr::Op;
using Instr = Expr::Instr;

struct FuncInfo {
  const char* name;
  Op op;
  int arity;
};

constexpr FuncInfo kFuncs[] = {
    {"sin", Op::Sin, 1},   {"cos", Op::Cos, 1},     {"tan", Op::Tan, 1},   {"exp", Op::Exp, 1},
    {"log", Op::Log, 1},   {"sqrt", Op::Sqrt, 1},   {"abs", Op::Abs, 1},   {"atan", Op::Atan, 1},
    {"sinh", Op::Sinh, 1}, {"cosh", Op::Cosh, 1},   {"atan2", Op::Atan2, 2}, {"pow", Op::Pow2, 2},
    {"min", Op::Min, 2},   {"max", Op::Max, 2},
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  std::vector<Instr> run(unsigned& used) {
    expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    used = used_;
    return std::move(code_);
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;
  std::vector<Instr> code_;
  unsigned used_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  void emit(Op op, int arg = 0, double value = 0.0) { code_.push_back({op, arg, value}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::Add);
      } else if (accept('-')) {
        term();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }
  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }
  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::Neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }
  void power() {
    primary();
    if (accept('^')) {
      const size_t start = code_.size();
      unary();
      // A literal exponent (possibly negated) becomes a dedicated opcode.
      double c = 0.0;
      bool literal = false;
      if (code_.size() == start + 1 && code_[start].op == Op::Const) {
        c = code_[start].value;
        literal = true;
      } else if (code_.size() == start + 2 && code_[start].op == Op::Const && code_[start + 1].op == Op::Neg) {
        c = -code_[start].value;
        literal = true;
      }
      if (literal) {
        code_.resize(start);
        if (c == std::round(c) && std::abs(c) <= 64)
          emit(Op::IPow, static_cast<int>(c));
        else
          emit(Op::PowC, 0, c);
      } else {
        emit(Op::Pow);
      }
    }
  }
  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("malformed number");
      pos_ = static_cast<size_t>(ptr - s_.data());
      emit(Op::Const, 0, v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const size_t b = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(b, pos_ - b);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        for (const auto& f : kFuncs)
          if (id == f.name) {
            expr();
            for (int k = 1; k < f.arity; ++k) {
              expect(',');
              expr();
            }
            expect(')');
            emit(f.op);
            return;
          }
        fail("unknown function '" + id + "'");
      }
      if (id == "x") return var(Var::X);
      if (id == "y") return var(Var::Y);
      if (id == "theta" || id == "t") return var(Var::Theta);
      if (id == "kappa") return var(Var::Kappa);
      if (id == "pi") return emit(Op::Const, 0, std::numbers::pi);
      if (id == "e") return emit(Op::Const, 0, std::numbers::e);
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character");
  }
  void var(Var v) {
    used_ |= 1u << static_cast<int>(v);
    emit(Op::Var, static_cast<int>(v));
  }
};

int stack_depth(const std::vector<Instr>& code) {
  int d = 0, m = 0;
  for (const auto& in : code) {
    switch (in.op) {
      case Op::Const:
      case Op::Var:
        ++d;
        break;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow:
      case Op::Atan2: case Op::Pow2: case Op::Min: case Op::Max:
        --d;
        break;
      default:
        break;
    }
    m = std::max(m, d);
  }
  return std::max(m, 1);
}

inline double lift(double, double c) { return c; }
inline Dual2 lift(const Dual2&, double c) { return Dual2(c); }
inline Taylor2 lift(const Taylor2& p, double c) { return Taylor2(p.order(), c); }
inline Series1 lift(const Series1& p, double c) { return Series1(p.order(), c); }

inline double val(double a) { return a; }
template <class T>
double val(const T& a) {
  return a.value();
}

}  // namespace

Expr Expr::parse(const std::string& source) {
  Expr e{RawTag{}};
  e.source_ = source;
  std::string trimmed = source;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\n"));
  trimmed.erase(trimmed.find_last_not_of(" \t\n") + 1);
  if (trimmed == "auto") {
    e.auto_ = true;
    e.code_ = {{Op::Const, 0, 0.0}};
    return e;
  }
  Parser p(source);
  e.code_ = p.run(e.used_);
  e.max_depth_ = stack_depth(e.code_);
  return e;
}

Expr Expr::constant(double c) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, c);
  (void)ec;
  return parse(std::string(buf, ptr));
}

template <class T>
T Expr::eval(const Vars<T>& v) const {
  using std::abs, std::atan, std::atan2, std::cos, std::cosh, std::exp, std::log, std::pow, std::sin,
      std::sinh, std::sqrt, std::tan;
  std::vector<T> st;
  st.reserve(max_depth_);
  const T* slots[4] = {&v.x, &v.y, &v.theta, &v.kappa};
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const:
        st.push_back(lift(v.x, in.value));
        break;
      case Op::Var:
        st.push_back(*slots[in.arg]);
        break;
      case Op::Neg:
        st.back() = -st.back();
        break;
      case Op::IPow:
        st.back() = ipow(st.back(), in.arg);
        break;
      case Op::PowC:
        st.back() = pow(st.back(), in.value);
        break;
      case Op::Sin: st.back() = sin(st.back()); break;
      case Op::Cos: st.back() = cos(st.back()); break;
      case Op::Tan: st.back() = tan(st.back()); break;
      case Op::Exp: st.back() = exp(st.back()); break;
      case Op::Log: st.back() = log(st.back()); break;
      case Op::Sqrt: st.back() = sqrt(st.back()); break;
      case Op::Abs: st.back() = abs(st.back()); break;
      case Op::Atan: st.back() = atan(st.back()); break;
      case Op::Sinh: st.back() = sinh(st.back()); break;
      case Op::Cosh: st.back() = cosh(st.back()); break;
      default: {
        T b = std::move(st.back());
        st.pop_back();
        T& a = st.back();
        switch (in.op) {
          case Op::Add: a = a + b; break;
          case Op::Sub: a = a - b; break;
          case Op::Mul: a = a * b; break;
          case Op::Div: a = a / b; break;
          case Op::Pow:
          case Op::Pow2:
            a = pow(a, b);
            break;
          case Op::Atan2: a = atan2(a, b); break;
          case Op::Min: if (val(b) < val(a)) a = b; break;
          case Op::Max: if (val(b) > val(a)) a = b; break;
          default: throw std::logic_error("corrupt expression program");
        }
      }
    }
  }
  return st.back();
}

template double Expr::eval<double>(const Vars<double>&) const;
template Dual2 Expr::eval<Dual2>(const Vars<Dual2>&) const;
template Taylor2 Expr::eval<Taylor2>(const Vars<Taylor2>&) const;
template Series1 Expr::eval<Series1>(const Vars<Series1>&) const;

}  // namespace hoif
