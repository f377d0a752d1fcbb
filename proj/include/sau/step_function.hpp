#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sau/rational.hpp"

namespace sau {

// Real step function on [0,1) with rational breakpoints 0 = t_0 < ... < t_m = 1,
// taking value v_i on the half-open cell [t_i, t_{i+1}).
//
// Instances are always canonical: no zero-length cells and no two adjacent cells
// with equal values. Equality is therefore structural.
class StepFn {
 public:
  // The constant function 0.
  StepFn();

  static StepFn constant(Rational c);

  // Indicator of [lo, hi), 0 <= lo < hi <= 1.
  static StepFn indicator(const Rational& lo, const Rational& hi);

  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<Rational>& values() const { return values_; }
  std::size_t cells() const { return values_.size(); }

  Rational cell_length(std::size_t i) const { return breakpoints_[i + 1] - breakpoints_[i]; }

  // Value at t in [0,1).
  const Rational& operator()(const Rational& t) const;

  bool is_zero() const { return values_.size() == 1 && values_.front().is_zero(); }

  friend bool operator==(const StepFn&, const StepFn&) = default;

 private:
  friend StepFn canonicalize(std::vector<Rational> breakpoints, std::vector<Rational> values);
  StepFn(std::vector<Rational> breakpoints, std::vector<Rational> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {}

  std::vector<Rational> breakpoints_;
  std::vector<Rational> values_;
};

// Builds the canonical StepFn from raw cell data. Breakpoints must start at 0,
// end at 1 and be non-decreasing; repeated breakpoints denote zero-length cells,
// which are dropped. Throws StructuralError otherwise.
StepFn canonicalize(std::vector<Rational> breakpoints, std::vector<Rational> values);

// All functions re-expressed on the union of their breakpoints.
struct Refinement {
  std::vector<Rational> grid;
  std::vector<std::vector<Rational>> values;  // values[f][cell]

  std::size_t cells() const { return grid.size() - 1; }
};

Refinement common_refinement(std::span<const StepFn> fs);

// Union of the breakpoints of all functions, sorted.
std::vector<Rational> merged_grid(std::span<const StepFn* const> fs);

// Values of f on each cell of a grid that refines f's own breakpoints.
std::vector<Rational> sample_on(const StepFn& f, std::span<const Rational> grid);

struct Term {
  Rational coeff;
  const StepFn* fn;
};

StepFn lin_comb(std::span<const Term> terms);
StepFn pointwise_mul(const StepFn& f, const StepFn& g);

StepFn operator+(const StepFn& f, const StepFn& g);
StepFn operator-(const StepFn& f, const StepFn& g);
StepFn operator*(const Rational& c, const StepFn& f);

// f + c*g, the workhorse of residual updates.
StepFn axpy(const StepFn& f, const Rational& c, const StepFn& g);

Rational trace(const StepFn& f);
Rational inner(const StepFn& f, const StepFn& g);
Rational norm2_sq(const StepFn& f);
Rational norm_inf(const StepFn& f);

// Exact Gram matrix of a list of functions.
std::vector<std::vector<Rational>> gram(std::span<const StepFn> fs);

// Value-wise wrapper asserting every value is exactly +1 or -1.
class SAUnitaryFn {
 public:
  // Throws DomainError if some value is not +-1.
  explicit SAUnitaryFn(StepFn f);

  static SAUnitaryFn one() { return SAUnitaryFn(StepFn::constant(1)); }

  const StepFn& fn() const { return fn_; }
  operator const StepFn&() const { return fn_; }  // NOLINT(google-explicit-constructor)

  friend bool operator==(const SAUnitaryFn&, const SAUnitaryFn&) = default;

 private:
  StepFn fn_;
};

// Value-wise wrapper asserting every value is exactly 0 or 1.
class ProjectionFn {
 public:
  explicit ProjectionFn(StepFn f);

  const StepFn& fn() const { return fn_; }
  operator const StepFn&() const { return fn_; }  // NOLINT(google-explicit-constructor)

  // 2p - 1.
  SAUnitaryFn to_unitary() const;

  friend bool operator==(const ProjectionFn&, const ProjectionFn&) = default;

 private:
  StepFn fn_;
};

// Index of the first cell whose value is not +-1, or cells() if there is none.
std::size_t first_non_unitary_cell(const StepFn& f);

}  // namespace sau
