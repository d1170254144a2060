#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace impdde::expr {

// Which free variables an expression may mention.
//   time        - `t` only (coefficients, delays)
//   time_state  - `t` and `x` (harvesting terms H(t, x))
//   kernel      - `s` only (delay kernels v(s), initial histories xi(s))
// `s` and `t` share the primary argument slot of evaluate().
enum class Context { time, time_state, kernel };

enum class Op : std::uint8_t {
  number,
  var_primary,  // t or s
  var_state,    // x
  neg,
  abs,
  sin,
  cos,
  exp,
  sqrt,
  add,
  sub,
  mul,
  div,
  pow,
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

// Immutable parsed expression. Nodes live in a flat arena; children always
// precede their parent, and the root is the last node.
class Expression {
 public:
  struct Node {
    Op op = Op::number;
    double value = 0.0;
    std::int32_t lhs = -1;
    std::int32_t rhs = -1;
    char name = 't';  // spelling of a primary variable, for printing
  };

  // The zero function.
  Expression();
  static Expression constant(double value);

  double operator()(double t, std::optional<double> x = std::nullopt) const;

  bool uses_state() const noexcept { return uses_state_; }
  bool is_constant() const noexcept;
  bool is_zero() const;

  // Fully parenthesised source text that parses back to the same tree.
  std::string to_string() const;

  bool structurally_equal(const Expression& other) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }

 private:
  friend class Parser;
  double eval(std::int32_t index, double t, double x) const;
  void print(std::int32_t index, std::string& out) const;
  bool equal(std::int32_t a, const Expression& other, std::int32_t b) const;

  std::vector<Node> nodes_;
  bool uses_state_ = false;
};

Expression parse(std::string_view source, Context context = Context::time);

// Throws DomainError on sqrt of a negative, division by zero or any other
// non-finite intermediate; ConfigError when `x` is needed but absent.
double evaluate(const Expression& e, double t, std::optional<double> x = std::nullopt);

struct SampleGrid {
  double t_window = 1000.0;
  std::size_t samples = 1'000'000;
  // Only used when the expression depends on x.
  std::optional<Interval> x_range;
  std::size_t x_samples = 17;
};

// Sampled min/max on t_j = j * t_window / samples, j = 0 .. samples-1,
// crossed with an evenly spaced grid on x_range (endpoints included) when the
// expression mentions x. Doubling `samples` refines the t-grid, so the
// interval can only grow.
Interval estimate_bounds(const Expression& e, const SampleGrid& grid);

}  // namespace impdde::expr
