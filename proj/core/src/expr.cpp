#include "impdde/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <thread>

#include "impdde/error.hpp"

namespace impdde::expr {

namespace {

bool is_unary(Op op) {
  switch (op) {
    case Op::neg:
    case Op::abs:
    case Op::sin:
    case Op::cos:
    case Op::exp:
    case Op::sqrt:
      return true;
    default:
      return false;
  }
}

const char* function_name(Op op) {
  switch (op) {
    case Op::abs:
      return "abs";
    case Op::sin:
      return "sin";
    case Op::cos:
      return "cos";
    case Op::exp:
      return "exp";
    case Op::sqrt:
      return "sqrt";
    default:
      return nullptr;
  }
}

char binary_symbol(Op op) {
  switch (op) {
    case Op::add:
      return '+';
    case Op::sub:
      return '-';
    case Op::mul:
      return '*';
    case Op::div:
      return '/';
    case Op::pow:
      return '^';
    default:
      return '?';
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// Recursive-descent parser over
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := primary ('^' unary)?
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view src, Context ctx) : src_(src), ctx_(ctx) {}

  Expression run() {
    skip_space();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    out_.nodes_.clear();
    parse_expr();
    skip_space();
    if (pos_ != src_.size()) throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
    return std::move(out_);
  }

 private:
  std::int32_t push(Expression::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<std::int32_t>(out_.nodes_.size() - 1);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::int32_t parse_expr() {
    std::int32_t lhs = parse_term();
    for (;;) {
      Op op;
      if (accept('+')) {
        op = Op::add;
      } else if (accept('-')) {
        op = Op::sub;
      } else {
        return lhs;
      }
      std::int32_t rhs = parse_term();
      lhs = push({op, 0.0, lhs, rhs});
    }
  }

  std::int32_t parse_term() {
    std::int32_t lhs = parse_unary();
    for (;;) {
      Op op;
      if (accept('*')) {
        op = Op::mul;
      } else if (accept('/')) {
        op = Op::div;
      } else {
        return lhs;
      }
      std::int32_t rhs = parse_unary();
      lhs = push({op, 0.0, lhs, rhs});
    }
  }

  std::int32_t parse_unary() {
    if (accept('-')) {
      std::int32_t operand = parse_unary();
      return push({Op::neg, 0.0, operand, -1});
    }
    return parse_power();
  }

  std::int32_t parse_power() {
    std::int32_t base = parse_primary();
    if (accept('^')) {
      std::int32_t exponent = parse_unary();
      return push({Op::pow, 0.0, base, exponent});
    }
    return base;
  }

  std::int32_t parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      std::int32_t inner = parse_expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  std::int32_t parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("malformed number", start);
    return push({Op::number, value, -1, -1});
  }

  std::int32_t parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, Op> functions[] = {
        {"abs", Op::abs}, {"sin", Op::sin}, {"cos", Op::cos}, {"exp", Op::exp}, {"sqrt", Op::sqrt}};
    for (const auto& [fname, op] : functions) {
      if (name == fname) {
        if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
        std::int32_t arg = parse_expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return push({op, 0.0, arg, -1});
      }
    }

    if (name == "t" || name == "s") {
      const bool kernel = ctx_ == Context::kernel;
      if ((name == "s") != kernel) {
        throw ParseError("variable '" + std::string(name) + "' not allowed here", start);
      }
      Expression::Node n{Op::var_primary, 0.0, -1, -1};
      n.name = name[0];
      return push(n);
    }
    if (name == "x") {
      if (ctx_ != Context::time_state) throw ParseError("variable 'x' not allowed here", start);
      out_.uses_state_ = true;
      return push({Op::var_state, 0.0, -1, -1});
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  Context ctx_;
  std::size_t pos_ = 0;
  Expression out_{};
};

Expression::Expression() { nodes_.push_back({Op::number, 0.0, -1, -1}); }

Expression Expression::constant(double value) {
  Expression e;
  e.nodes_.front().value = value;
  return e;
}

bool Expression::is_constant() const noexcept {
  return std::none_of(nodes_.begin(), nodes_.end(),
                      [](const Node& n) { return n.op == Op::var_primary || n.op == Op::var_state; });
}

bool Expression::is_zero() const {
  if (!is_constant()) return false;
  try {
    return eval(static_cast<std::int32_t>(nodes_.size()) - 1, 0.0, 0.0) == 0.0;
  } catch (const DomainError&) {
    return false;
  }
}

double Expression::operator()(double t, std::optional<double> x) const {
  if (uses_state_ && !x) throw ConfigError("expression needs a value for x");
  const double v = eval(static_cast<std::int32_t>(nodes_.size()) - 1, t, x.value_or(0.0));
  if (!std::isfinite(v)) throw DomainError("non-finite value in " + to_string());
  return v;
}

double Expression::eval(std::int32_t index, double t, double x) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.op) {
    case Op::number:
      return n.value;
    case Op::var_primary:
      return t;
    case Op::var_state:
      return x;
    case Op::neg:
      return -eval(n.lhs, t, x);
    case Op::abs:
      return std::fabs(eval(n.lhs, t, x));
    case Op::sin:
      return std::sin(eval(n.lhs, t, x));
    case Op::cos:
      return std::cos(eval(n.lhs, t, x));
    case Op::exp:
      return std::exp(eval(n.lhs, t, x));
    case Op::sqrt: {
      const double a = eval(n.lhs, t, x);
      if (a < 0.0) throw DomainError("sqrt of negative operand");
      return std::sqrt(a);
    }
    case Op::add:
      return eval(n.lhs, t, x) + eval(n.rhs, t, x);
    case Op::sub:
      return eval(n.lhs, t, x) - eval(n.rhs, t, x);
    case Op::mul:
      return eval(n.lhs, t, x) * eval(n.rhs, t, x);
    case Op::div: {
      const double num = eval(n.lhs, t, x);
      const double den = eval(n.rhs, t, x);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Op::pow: {
      const double base = eval(n.lhs, t, x);
      const double exponent = eval(n.rhs, t, x);
      // Integer powers are by far the common case (sin(...)^2).
      if (exponent == 2.0) return base * base;
      const double v = std::pow(base, exponent);
      if (std::isnan(v)) throw DomainError("power of negative base with non-integer exponent");
      return v;
    }
  }
  return 0.0;
}

void Expression::print(std::int32_t index, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  if (n.op == Op::number) {
    out += format_number(n.value);
  } else if (n.op == Op::var_primary) {
    out += n.name;
  } else if (n.op == Op::var_state) {
    out += 'x';
  } else if (n.op == Op::neg) {
    out += "(-";
    print(n.lhs, out);
    out += ')';
  } else if (is_unary(n.op)) {
    out += function_name(n.op);
    out += '(';
    print(n.lhs, out);
    out += ')';
  } else {
    out += '(';
    print(n.lhs, out);
    out += ' ';
    out += binary_symbol(n.op);
    out += ' ';
    print(n.rhs, out);
    out += ')';
  }
}

std::string Expression::to_string() const {
  std::string out;
  print(static_cast<std::int32_t>(nodes_.size()) - 1, out);
  return out;
}

bool Expression::equal(std::int32_t a, const Expression& other, std::int32_t b) const {
  const Node& x = nodes_[static_cast<std::size_t>(a)];
  const Node& y = other.nodes_[static_cast<std::size_t>(b)];
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::number:
      return x.value == y.value;
    case Op::var_primary:
    case Op::var_state:
      return true;
    default:
      break;
  }
  if (!equal(x.lhs, other, y.lhs)) return false;
  return is_unary(x.op) || equal(x.rhs, other, y.rhs);
}

bool Expression::structurally_equal(const Expression& other) const {
  return equal(static_cast<std::int32_t>(nodes_.size()) - 1, other,
               static_cast<std::int32_t>(other.nodes_.size()) - 1);
}

Expression parse(std::string_view source, Context context) { return Parser(source, context).run(); }

double evaluate(const Expression& e, double t, std::optional<double> x) { return e(t, x); }

Interval estimate_bounds(const Expression& e, const SampleGrid& grid) {
  if (grid.samples < 2) throw ConfigError("estimate_bounds needs at least 2 samples");
  if (!(grid.t_window > 0.0)) throw ConfigError("estimate_bounds needs a positive window");

  if (e.is_constant() && !e.uses_state()) {
    const double v = e(0.0, 0.0);
    return {v, v};
  }

  std::vector<double> xs{0.0};
  if (e.uses_state()) {
    if (!grid.x_range) throw ConfigError("expression depends on x but no x range was given");
    const Interval r = *grid.x_range;
    const std::size_t nx = std::max<std::size_t>(grid.x_samples, 2);
    xs.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) {
      xs[i] = r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(nx - 1);
    }
  }

  const std::size_t n = grid.samples;
  const double dt = grid.t_window / static_cast<double>(n);
  auto scan = [&](std::size_t begin, std::size_t end) {
    Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t j = begin; j < end; ++j) {
      const double t = static_cast<double>(j) * dt;
      for (double x : xs) {
        const double v = e(t, x);
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
      }
    }
    return r;
  };

  const std::size_t work = n * xs.size();
  const std::size_t workers =
      work < 200'000 ? 1 : std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 16));
  if (workers == 1) return scan(0, n);

  std::vector<std::future<Interval>> parts;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    parts.push_back(std::async(std::launch::async, scan, begin, end));
  }
  Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (auto& p : parts) {
    const Interval part = p.get();
    r.lo = std::min(r.lo, part.lo);
    r.hi = std::max(r.hi, part.hi);
  }
  return r;
}

}  // namespace impdde::expr
