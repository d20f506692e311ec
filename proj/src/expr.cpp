#include "rwt/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include "rwt/error.hpp"
#include "rwt/text.hpp"

namespace rwt {

namespace {

struct FunctionEntry {
  std::string_view name;
  NodeKind kind;
};

constexpr FunctionEntry kFunctions[] = {{"cos", NodeKind::kCos},
                                        {"tan", NodeKind::kTan},
                                        {"tanh", NodeKind::kTanh},
                                        {"exp", NodeKind::kExp},
                                        {"log", NodeKind::kLog}};

bool is_function(NodeKind k) {
  return k == NodeKind::kCos || k == NodeKind::kTan || k == NodeKind::kTanh ||
         k == NodeKind::kExp || k == NodeKind::kLog;
}

class Parser {
 public:
  Parser(std::string_view s, int max_variable) : s_(s), max_variable_(max_variable) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ < s_.size()) fail(pos_, "unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg,
                         ErrorCode code = ErrorCode::kParseError) const {
    throw ParseError(code, at, msg);
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

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e = Expr::add(e, term());
      } else if (accept('-')) {
        e = Expr::sub(e, term());
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) {
        e = Expr::mul(e, unary());
      } else if (accept('/')) {
        e = Expr::div(e, unary());
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::neg(unary());
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    skip();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < s_.size() && s_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits || pos_ - digits > 6) fail(start, "expected an integer exponent");
    const int n = std::stoi(std::string(s_.substr(digits, pos_ - digits)));
    return Expr::pow(base, negative ? -n : n);
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ - from;
    };
    std::size_t count = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail(start, "malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < s_.size() && (s_[look] == '+' || s_[look] == '-')) ++look;
      if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
        pos_ = look;
        digits();
      }
    }
    return Expr::constant_text(std::string(s_.substr(start, pos_ - start)));
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail(pos_, "unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail(pos_, "expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name.size() > 1 && name[0] == 'x' &&
          std::all_of(name.begin() + 1, name.end(),
                      [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
        const std::string digits(name.substr(1));
        const long index = digits.size() > 4 ? 100000 : std::stol(digits);
        if (index < 1 || index > max_variable_) {
          fail(start, "variable " + std::string(name) + " outside x1..x" +
                          std::to_string(max_variable_),
               ErrorCode::kBadVariableIndex);
        }
        return Expr::variable(static_cast<int>(index));
      }
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        for (const auto& f : kFunctions) {
          if (f.name == name) {
            ++pos_;
            Expr arg = expr();
            if (!accept(')')) fail(pos_, "expected ')'");
            return Expr::call(f.kind, arg);
          }
        }
        fail(start, "unknown function '" + std::string(name) + "'", ErrorCode::kUnknownFunction);
      }
      fail(start, "unknown identifier '" + std::string(name) + "'");
    }
    fail(pos_, "unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  int max_variable_;
  std::size_t pos_ = 0;
};

// Printing precedence: 1 sum, 2 product, 3 unary minus, 4 power, 5 atom.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::kAdd:
      return 1;
    case NodeKind::kMul:
    case NodeKind::kDiv:
      return 2;
    case NodeKind::kNeg:
      return 3;
    case NodeKind::kPow:
      return 4;
    case NodeKind::kConst:
      return !e.text().empty() && e.text()[0] == '-' ? 3 : 5;
    default:
      return 5;
  }
}

void print(const Expr& e, int min_level, std::string& out);

void print_raw(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::kConst:
      out += e.text();
      return;
    case NodeKind::kVar:
      out += 'x';
      out += std::to_string(e.index());
      return;
    case NodeKind::kAdd: {
      print(e.child(0), 1, out);
      const Expr& b = e.child(1);
      if (b.kind() == NodeKind::kNeg) {
        out += " - ";
        print(b.child(0), 2, out);
      } else if (b.is_constant() && !b.text().empty() && b.text()[0] == '-') {
        out += " - ";
        out += b.text().substr(1);
      } else {
        out += " + ";
        print(b, 2, out);
      }
      return;
    }
    case NodeKind::kMul:
    case NodeKind::kDiv:
      print(e.child(0), 2, out);
      out += e.kind() == NodeKind::kMul ? '*' : '/';
      print(e.child(1), 3, out);
      return;
    case NodeKind::kNeg:
      out += '-';
      print(e.child(0), 3, out);
      return;
    case NodeKind::kPow:
      print(e.child(0), 5, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    default:
      out += function_name(e.kind());
      out += '(';
      print(e.child(0), 1, out);
      out += ')';
      return;
  }
}

void print(const Expr& e, int min_level, std::string& out) {
  if (precedence(e) < min_level) {
    out += '(';
    print_raw(e, out);
    out += ')';
  } else {
    print_raw(e, out);
  }
}

double int_power(double b, int n) {
  const int m = n < 0 ? -n : n;
  if (m > 16) return std::pow(b, static_cast<double>(m));
  double r = 1.0;
  for (int k = 0; k < m; ++k) r *= b;
  return r;
}

struct EvalState {
  std::span<const double> x;
  bool out_of_domain = false;
  double min_den = std::numeric_limits<double>::infinity();

  double guard(double den, const char* what) {
    const double mag = std::abs(den);
    min_den = std::min(min_den, mag);
    if (!(mag >= kPoleThreshold)) {
      throw Error(ErrorCode::kPoleError, std::string(what) + " vanishes (|value| = " +
                                             format_double(mag) + ")");
    }
    return den;
  }

  double var(int index) {
    const auto slot = static_cast<std::size_t>(index - 1);
    if (slot >= x.size()) {
      throw Error(ErrorCode::kUnboundVariable, "x" + std::to_string(index) + " is not bound");
    }
    const double v = x[slot];
    if (!(v >= 0.0 && v <= 1.0)) out_of_domain = true;
    return v;
  }
};

double eval_value(const Expr& e, EvalState& st) {
  switch (e.kind()) {
    case NodeKind::kConst:
      return e.value();
    case NodeKind::kVar:
      return st.var(e.index());
    case NodeKind::kAdd:
      return eval_value(e.child(0), st) + eval_value(e.child(1), st);
    case NodeKind::kMul:
      return eval_value(e.child(0), st) * eval_value(e.child(1), st);
    case NodeKind::kDiv: {
      const double a = eval_value(e.child(0), st);
      return a / st.guard(eval_value(e.child(1), st), "denominator");
    }
    case NodeKind::kPow: {
      const double p = int_power(eval_value(e.child(0), st), e.exponent());
      return e.exponent() < 0 ? 1.0 / st.guard(p, "denominator") : p;
    }
    case NodeKind::kNeg:
      return -eval_value(e.child(0), st);
    case NodeKind::kCos:
      return std::cos(eval_value(e.child(0), st));
    case NodeKind::kTan: {
      const double u = eval_value(e.child(0), st);
      st.guard(std::cos(u), "cos of tan argument");
      return std::tan(u);
    }
    case NodeKind::kTanh:
      return std::tanh(eval_value(e.child(0), st));
    case NodeKind::kExp:
      return std::exp(eval_value(e.child(0), st));
    case NodeKind::kLog: {
      const double u = eval_value(e.child(0), st);
      if (!(u > 0.0)) {
        throw Error(ErrorCode::kDomainError, "log of non-positive value " + format_double(u));
      }
      return std::log(u);
    }
  }
  return 0.0;
}

struct Dual {
  double v;
  double d;
};

Dual eval_dual(const Expr& e, int wrt, EvalState& st) {
  switch (e.kind()) {
    case NodeKind::kConst:
      return {e.value(), 0.0};
    case NodeKind::kVar:
      return {st.var(e.index()), e.index() == wrt ? 1.0 : 0.0};
    case NodeKind::kAdd: {
      const Dual a = eval_dual(e.child(0), wrt, st), b = eval_dual(e.child(1), wrt, st);
      return {a.v + b.v, a.d + b.d};
    }
    case NodeKind::kMul: {
      const Dual a = eval_dual(e.child(0), wrt, st), b = eval_dual(e.child(1), wrt, st);
      return {a.v * b.v, a.d * b.v + a.v * b.d};
    }
    case NodeKind::kDiv: {
      const Dual a = eval_dual(e.child(0), wrt, st), b = eval_dual(e.child(1), wrt, st);
      st.guard(b.v, "denominator");
      return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
    case NodeKind::kPow: {
      const Dual b = eval_dual(e.child(0), wrt, st);
      const int n = e.exponent();
      const double p = int_power(b.v, n);
      if (n < 0) {
        st.guard(p, "denominator");
        const double v = 1.0 / p;
        return {v, n * (v / b.v) * b.d};
      }
      if (n == 0) return {1.0, 0.0};
      return {p, n * int_power(b.v, n - 1) * b.d};
    }
    case NodeKind::kNeg: {
      const Dual a = eval_dual(e.child(0), wrt, st);
      return {-a.v, -a.d};
    }
    case NodeKind::kCos: {
      const Dual u = eval_dual(e.child(0), wrt, st);
      return {std::cos(u.v), -std::sin(u.v) * u.d};
    }
    case NodeKind::kTan: {
      const Dual u = eval_dual(e.child(0), wrt, st);
      const double c = st.guard(std::cos(u.v), "cos of tan argument");
      return {std::tan(u.v), u.d / (c * c)};
    }
    case NodeKind::kTanh: {
      const Dual u = eval_dual(e.child(0), wrt, st);
      const double t = std::tanh(u.v);
      return {t, (1.0 - t * t) * u.d};
    }
    case NodeKind::kExp: {
      const Dual u = eval_dual(e.child(0), wrt, st);
      const double v = std::exp(u.v);
      return {v, v * u.d};
    }
    case NodeKind::kLog: {
      const Dual u = eval_dual(e.child(0), wrt, st);
      if (!(u.v > 0.0)) {
        throw Error(ErrorCode::kDomainError, "log of non-positive value " + format_double(u.v));
      }
      return {std::log(u.v), u.d / u.v};
    }
  }
  return {0.0, 0.0};
}

void collect_variables(const Expr& e, std::vector<int>& out) {
  if (e.kind() == NodeKind::kVar) out.push_back(e.index());
  for (std::size_t i = 0; i < e.arity(); ++i) collect_variables(e.child(i), out);
}

// Linear combination of non-constant terms plus a constant.
struct LinearForm {
  std::vector<std::pair<double, Expr>> terms;
  double constant = 0.0;

  void scale(double k) {
    for (auto& t : terms) t.first *= k;
    constant *= k;
  }
};

void collect(const Expr& e, double k, LinearForm& form) {
  switch (e.kind()) {
    case NodeKind::kConst:
      form.constant += k * e.value();
      return;
    case NodeKind::kAdd:
      collect(e.child(0), k, form);
      collect(e.child(1), k, form);
      return;
    case NodeKind::kNeg:
      collect(e.child(0), -k, form);
      return;
    case NodeKind::kMul:
      if (e.child(0).is_constant()) return collect(e.child(1), k * e.child(0).value(), form);
      if (e.child(1).is_constant()) return collect(e.child(0), k * e.child(1).value(), form);
      break;
    case NodeKind::kDiv:
      if (e.child(1).is_constant() && e.child(1).value() != 0.0) {
        return collect(e.child(0), k / e.child(1).value(), form);
      }
      break;
    default:
      break;
  }
  form.terms.emplace_back(k, e);
}

Expr scaled_term(double c, const Expr& rest) {
  if (c == 1.0) return rest;
  if (rest.kind() == NodeKind::kDiv && rest.child(0).is_constant()) {
    return Expr::div(Expr::constant(c * rest.child(0).value()), rest.child(1));
  }
  return Expr::mul(Expr::constant(c), rest);
}

Expr rebuild(const LinearForm& raw) {
  // Merge structurally equal terms, keeping first appearance.
  std::vector<std::pair<double, Expr>> merged;
  std::map<std::string, std::size_t> slot;
  for (const auto& [c, rest] : raw.terms) {
    const std::string key = to_string(rest);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, merged.size());
      merged.emplace_back(c, rest);
    } else {
      merged[it->second].first += c;
    }
  }
  std::vector<std::pair<double, Expr>> ordered;
  for (const auto& t : merged) {
    if (t.first != 0.0 && t.second.kind() == NodeKind::kVar) ordered.push_back(t);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.second.index() < b.second.index();
  });
  for (const auto& t : merged) {
    if (t.first != 0.0 && t.second.kind() != NodeKind::kVar) ordered.push_back(t);
  }
  if (ordered.empty()) return Expr::constant(raw.constant);
  Expr acc = ordered.front().first == -1.0 ? Expr::neg(ordered.front().second)
                                           : scaled_term(ordered.front().first,
                                                         ordered.front().second);
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    const auto& [c, rest] = ordered[i];
    acc = c < 0.0 ? Expr::sub(acc, scaled_term(-c, rest)) : Expr::add(acc, scaled_term(c, rest));
  }
  if (raw.constant > 0.0) acc = Expr::add(acc, Expr::constant(raw.constant));
  if (raw.constant < 0.0) acc = Expr::sub(acc, Expr::constant(-raw.constant));
  return acc;
}

Expr fold_or_keep(const Expr& e) {
  for (std::size_t i = 0; i < e.arity(); ++i) {
    if (!e.child(i).is_constant()) return e;
  }
  try {
    return Expr::constant(evaluate(e, {}));
  } catch (const Error&) {
    return e;
  }
}

}  // namespace

Expr Expr::make(Node node) { return Expr(std::make_shared<const Node>(std::move(node))); }

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::kInvalidParam, "non-finite constant");
  Node n;
  n.kind = NodeKind::kConst;
  n.value = value;
  n.text = format_double(value);
  return make(std::move(n));
}

Expr Expr::constant_text(std::string text) {
  Node n;
  n.kind = NodeKind::kConst;
  const auto value = parse_double(text);
  if (!value || !std::isfinite(*value)) {
    throw ParseError(ErrorCode::kParseError, 0, "malformed number '" + text + "'");
  }
  n.value = *value;
  n.text = std::move(text);
  return make(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 1) throw Error(ErrorCode::kBadVariableIndex, "variables are numbered from 1");
  Node n;
  n.kind = NodeKind::kVar;
  n.index = index;
  return make(std::move(n));
}

Expr Expr::add(Expr a, Expr b) { return make({NodeKind::kAdd, 0.0, {}, 0, {a, b}}); }
Expr Expr::mul(Expr a, Expr b) { return make({NodeKind::kMul, 0.0, {}, 0, {a, b}}); }
Expr Expr::div(Expr a, Expr b) { return make({NodeKind::kDiv, 0.0, {}, 0, {a, b}}); }
Expr Expr::pow(Expr base, int exponent) {
  return make({NodeKind::kPow, 0.0, {}, exponent, {base}});
}
Expr Expr::neg(Expr a) { return make({NodeKind::kNeg, 0.0, {}, 0, {a}}); }
Expr Expr::call(NodeKind fn, Expr arg) {
  if (!is_function(fn)) throw Error(ErrorCode::kInvalidParam, "not a function node");
  return make({fn, 0.0, {}, 0, {arg}});
}

std::string_view function_name(NodeKind fn) {
  for (const auto& f : kFunctions) {
    if (f.kind == fn) return f.name;
  }
  return "?";
}

Expr parse_expression(std::string_view text, int max_variable) {
  return Parser(text, max_variable).parse();
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 1, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind() || a.arity() != b.arity()) return false;
  if (a.kind() == NodeKind::kConst) return a.value() == b.value() && a.text() == b.text();
  if (a.kind() == NodeKind::kVar || a.kind() == NodeKind::kPow) {
    if (a.index() != b.index()) return false;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!structurally_equal(a.child(i), b.child(i))) return false;
  }
  return true;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < e.arity(); ++i) n += node_count(e.child(i));
  return n;
}

int max_variable(const Expr& e) {
  const auto v = variables(e);
  return v.empty() ? 0 : v.back();
}

std::vector<int> variables(const Expr& e) {
  std::vector<int> out;
  collect_variables(e, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EvalResult evaluate_checked(const Expr& e, std::span<const double> x) {
  EvalState st{x};
  const double v = eval_value(e, st);
  return {v, st.out_of_domain, st.min_den};
}

double evaluate(const Expr& e, std::span<const double> x) {
  EvalState st{x};
  return eval_value(e, st);
}

double partial(const Expr& e, int index, std::span<const double> x) {
  EvalState st{x};
  return eval_dual(e, index, st).d;
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::kConst:
    case NodeKind::kVar:
      return e;
    case NodeKind::kAdd:
    case NodeKind::kNeg:
    case NodeKind::kMul:
    case NodeKind::kDiv: {
      std::vector<Expr> kids;
      for (std::size_t i = 0; i < e.arity(); ++i) kids.push_back(simplify(e.child(i)));
      Expr s;
      switch (e.kind()) {
        case NodeKind::kAdd:
          s = Expr::add(kids[0], kids[1]);
          break;
        case NodeKind::kNeg:
          s = Expr::neg(kids[0]);
          break;
        case NodeKind::kMul:
          s = Expr::mul(kids[0], kids[1]);
          break;
        default:
          s = Expr::div(kids[0], kids[1]);
          break;
      }
      const bool linear = e.kind() == NodeKind::kAdd || e.kind() == NodeKind::kNeg ||
                          (e.kind() == NodeKind::kMul &&
                           (kids[0].is_constant() || kids[1].is_constant())) ||
                          (e.kind() == NodeKind::kDiv && kids[1].is_constant() &&
                           kids[1].value() != 0.0);
      if (!linear) return fold_or_keep(s);
      LinearForm form;
      collect(s, 1.0, form);
      return rebuild(form);
    }
    case NodeKind::kPow: {
      const Expr base = simplify(e.child(0));
      if (e.exponent() == 1) return base;
      if (e.exponent() == 0) return Expr::constant(1.0);
      return fold_or_keep(Expr::pow(base, e.exponent()));
    }
    default:
      return fold_or_keep(Expr::call(e.kind(), simplify(e.child(0))));
  }
}

}  // namespace rwt
