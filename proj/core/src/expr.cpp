#include "relsens/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "relsens/error.hpp"

namespace relsens {
namespace {

struct FuncInfo {
  std::string_view name;
  Func func;
  std::size_t min_args;
  std::size_t max_args;
};

constexpr std::array<FuncInfo, 6> kFuncs{{
    {"ln", Func::Ln, 1, 1},
    {"exp", Func::Exp, 1, 1},
    {"sqrt", Func::Sqrt, 1, 1},
    {"abs", Func::Abs, 1, 1},
    {"min", Func::Min, 2, 255},
    {"max", Func::Max, 2, 255},
}};

const FuncInfo& info(Func f) {
  for (const auto& fi : kFuncs) {
    if (fi.func == f) return fi;
  }
  throw Error(ErrorKind::UnknownFunction, "unknown function");
}

ExprPtr make(ExprNode node) { return std::make_shared<const ExprNode>(std::move(node)); }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    skip_space();
    if (pos_ == text_.size()) throw SyntaxError(ErrorKind::Syntax, "empty expression", 0);
    ExprPtr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(ErrorKind::Syntax, msg, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ == text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  ExprPtr binary(char op, ExprPtr lhs, ExprPtr rhs) {
    ExprNode n;
    n.kind = ExprNode::Kind::Binary;
    n.op = op;
    n.args = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
  }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = binary('+', lhs, parse_product());
      } else if (accept('-')) {
        lhs = binary('-', lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_product() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary('*', lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary('/', lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (accept('-')) {
      ExprNode n;
      n.kind = ExprNode::Kind::Negate;
      n.args = {parse_unary()};
      return make(std::move(n));
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (accept('^')) return binary('^', base, parse_unary());
    return base;
  }

  ExprPtr parse_atom() {
    skip_space();
    if (pos_ == text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    ExprNode n;
    n.kind = ExprNode::Kind::Constant;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, n.value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return make(std::move(n));
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      const auto it = std::find_if(kFuncs.begin(), kFuncs.end(),
                                   [&](const FuncInfo& fi) { return fi.name == name; });
      if (it == kFuncs.end()) {
        throw SyntaxError(ErrorKind::UnknownFunction, "unknown function '" + name + "'", start);
      }
      ++pos_;
      ExprNode n;
      n.kind = ExprNode::Kind::Call;
      n.func = it->func;
      n.args.push_back(parse_sum());
      while (accept(',')) n.args.push_back(parse_sum());
      expect(')');
      if (n.args.size() < it->min_args || n.args.size() > it->max_args) {
        throw SyntaxError(ErrorKind::Syntax,
                          "function '" + name + "' called with " + std::to_string(n.args.size()) +
                              " argument(s)",
                          start);
      }
      return make(std::move(n));
    }
    ExprNode n;
    n.kind = ExprNode::Kind::Variable;
    n.name = std::move(name);
    return make(std::move(n));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Binary:
      switch (n.op) {
        case '+':
        case '-': return 1;
        case '*':
        case '/': return 2;
        default: return 4;
      }
    case ExprNode::Kind::Negate: return 3;
    case ExprNode::Kind::Constant: return n.value < 0.0 ? 3 : 5;
    default: return 5;
  }
}

void print(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::Constant: {
      std::array<char, 32> buf{};
      const double mag = std::fabs(n.value);
      auto res = std::to_chars(buf.data(), buf.data() + buf.size(), mag);
      if (n.value < 0.0 || std::signbit(n.value)) out += '-';
      out.append(buf.data(), res.ptr);
      return;
    }
    case ExprNode::Kind::Variable: out += n.name; return;
    case ExprNode::Kind::Negate:
      out += '-';
      print_child(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case ExprNode::Kind::Call: {
      out += info(n.func).name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print(*n.args[i], out);
      }
      out += ')';
      return;
    }
    case ExprNode::Kind::Binary: {
      const int p = precedence(n);
      const ExprNode& l = *n.args[0];
      const ExprNode& r = *n.args[1];
      if (n.op == '^') {
        print_child(l, precedence(l) <= 4, out);
        out += '^';
        print_child(r, precedence(r) < 3, out);
        return;
      }
      print_child(l, precedence(l) < p, out);
      out += ' ';
      out += n.op;
      out += ' ';
      print_child(r, precedence(r) <= p, out);
      return;
    }
  }
}

void collect(const ExprNode& n, std::vector<std::string>& names) {
  if (n.kind == ExprNode::Kind::Variable &&
      std::find(names.begin(), names.end(), n.name) == names.end()) {
    names.push_back(n.name);
  }
  for (const auto& a : n.args) collect(*a, names);
}

}  // namespace

std::string_view to_string(Func f) noexcept {
  for (const auto& fi : kFuncs) {
    if (fi.func == f) return fi.name;
  }
  return "?";
}

bool operator==(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case ExprNode::Kind::Constant:
      if (a.value != b.value) return false;
      break;
    case ExprNode::Kind::Variable:
      if (a.name != b.name) return false;
      break;
    case ExprNode::Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case ExprNode::Kind::Call:
      if (a.func != b.func) return false;
      break;
    case ExprNode::Kind::Negate: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!(*a.args[i] == *b.args[i])) return false;
  }
  return true;
}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse()); }

Expr Expr::constant(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "expression constants must be finite");
  ExprNode n;
  n.kind = ExprNode::Kind::Constant;
  n.value = v;
  return Expr(make(std::move(n)));
}

Expr Expr::variable(std::string name) {
  ExprNode n;
  n.kind = ExprNode::Kind::Variable;
  n.name = std::move(name);
  return Expr(make(std::move(n)));
}

Expr Expr::negate(Expr e) {
  ExprNode n;
  n.kind = ExprNode::Kind::Negate;
  n.args = {std::move(e.root_)};
  return Expr(make(std::move(n)));
}

Expr Expr::binary(char op, Expr lhs, Expr rhs) {
  if (op != '+' && op != '-' && op != '*' && op != '/' && op != '^') {
    throw Error(ErrorKind::InvalidArgument, std::string("unknown operator '") + op + "'");
  }
  ExprNode n;
  n.kind = ExprNode::Kind::Binary;
  n.op = op;
  n.args = {std::move(lhs.root_), std::move(rhs.root_)};
  return Expr(make(std::move(n)));
}

Expr Expr::call(Func f, std::vector<Expr> args) {
  const FuncInfo& fi = info(f);
  if (args.size() < fi.min_args || args.size() > fi.max_args) {
    throw Error(ErrorKind::InvalidArgument,
                "wrong number of arguments for '" + std::string(fi.name) + "'");
  }
  ExprNode n;
  n.kind = ExprNode::Kind::Call;
  n.func = f;
  for (auto& a : args) n.args.push_back(std::move(a.root_));
  return Expr(make(std::move(n)));
}

std::vector<std::string> Expr::variables() const {
  std::vector<std::string> names;
  collect(*root_, names);
  return names;
}

bool Expr::uses(std::string_view name) const {
  const auto names = variables();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

BoundExpr::BoundExpr(const Expr& expr, std::span<const std::string> input_names)
    : names_(input_names.begin(), input_names.end()), source_(expr.to_string()) {
  for (const auto& n : names_) {
    if (n == kDesignSymbol) {
      throw Error(ErrorKind::DesignParameter,
                  "input name 'a' is reserved for the design parameter");
    }
  }
  for (const auto& v : expr.variables()) {
    if (v == kDesignSymbol) continue;
    if (std::find(names_.begin(), names_.end(), v) == names_.end()) {
      throw Error(ErrorKind::UnknownIdentifier, "undeclared variable '" + v + "'");
    }
  }
  has_design_ = expr.uses(kDesignSymbol);
  compile(expr.root());
  std::size_t depth = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Push:
      case Op::Load:
      case Op::LoadDesign: ++depth; break;
      case Op::Neg: break;
      case Op::Call: depth -= ins.argc - 1u; break;
      default: --depth; break;
    }
    max_stack_ = std::max(max_stack_, depth);
  }
}

void BoundExpr::compile(const ExprNode& node) {
  switch (node.kind) {
    case ExprNode::Kind::Constant: code_.push_back({Op::Push, 0, Func::Ln, 0, node.value}); return;
    case ExprNode::Kind::Variable: {
      if (node.name == kDesignSymbol) {
        code_.push_back({Op::LoadDesign});
        return;
      }
      const auto idx = static_cast<std::size_t>(
          std::find(names_.begin(), names_.end(), node.name) - names_.begin());
      code_.push_back({Op::Load, 0, Func::Ln, idx, 0.0});
      return;
    }
    case ExprNode::Kind::Negate:
      compile(*node.args[0]);
      code_.push_back({Op::Neg});
      return;
    case ExprNode::Kind::Binary: {
      compile(*node.args[0]);
      compile(*node.args[1]);
      Op op = Op::Add;
      switch (node.op) {
        case '+': op = Op::Add; break;
        case '-': op = Op::Sub; break;
        case '*': op = Op::Mul; break;
        case '/': op = Op::Div; break;
        default: op = Op::Pow; break;
      }
      code_.push_back({op});
      return;
    }
    case ExprNode::Kind::Call:
      for (const auto& a : node.args) compile(*a);
      code_.push_back({Op::Call, static_cast<unsigned char>(node.args.size()), node.func});
      return;
  }
}

void BoundExpr::fail_domain(const std::string& what, std::span<const double> x, double a) const {
  std::string msg = what + " in '" + source_ + "' at";
  for (std::size_t i = 0; i < names_.size(); ++i) {
    msg += (i ? ", " : " ") + names_[i] + "=" + std::to_string(x[i]);
  }
  if (has_design_) msg += ", a=" + std::to_string(a);
  throw Error(ErrorKind::DomainError, msg);
}

double BoundExpr::evaluate(std::span<const double> x, double a) const {
  if (x.size() != names_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "expression expects " + std::to_string(names_.size()) + " inputs, got " +
                    std::to_string(x.size()));
  }
  std::array<double, 64> small{};
  std::vector<double> big;
  double* stack = small.data();
  if (max_stack_ > small.size()) {
    big.resize(max_stack_);
    stack = big.data();
  }
  std::size_t sp = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Push: stack[sp++] = ins.value; break;
      case Op::Load: stack[sp++] = x[ins.index]; break;
      case Op::LoadDesign: stack[sp++] = a; break;
      case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
      case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
      case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
      case Op::Div:
        --sp;
        if (stack[sp] == 0.0) fail_domain("division by zero", x, a);
        stack[sp - 1] /= stack[sp];
        break;
      case Op::Pow: {
        --sp;
        const double r = std::pow(stack[sp - 1], stack[sp]);
        if (std::isnan(r)) fail_domain("power of a negative base", x, a);
        stack[sp - 1] = r;
        break;
      }
      case Op::Call: {
        double& top = stack[sp - ins.argc];
        switch (ins.func) {
          case Func::Ln:
            if (!(top > 0.0)) fail_domain("ln of nonpositive value " + std::to_string(top), x, a);
            top = std::log(top);
            break;
          case Func::Exp: top = std::exp(top); break;
          case Func::Sqrt:
            if (top < 0.0) fail_domain("sqrt of negative value " + std::to_string(top), x, a);
            top = std::sqrt(top);
            break;
          case Func::Abs: top = std::fabs(top); break;
          case Func::Min:
            for (std::size_t k = 1; k < ins.argc; ++k) top = std::min(top, stack[sp - ins.argc + k]);
            break;
          case Func::Max:
            for (std::size_t k = 1; k < ins.argc; ++k) top = std::max(top, stack[sp - ins.argc + k]);
            break;
        }
        sp -= ins.argc - 1u;
        break;
      }
    }
  }
  const double result = stack[0];
  if (std::isnan(result)) {
    std::string msg = "expression '" + source_ + "' evaluated to NaN";
    throw Error(ErrorKind::Evaluation, msg);
  }
  return result;
}

}  // namespace relsens
