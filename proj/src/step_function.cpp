#include "sau/step_function.hpp"

#include <algorithm>
#include <string>

#include "sau/errors.hpp"

namespace sau {
namespace {

// Merges equal neighbours of a grid known to be strictly increasing.
StepFn from_strict_grid(std::vector<Rational> grid, std::vector<Rational> values) {
  return canonicalize(std::move(grid), std::move(values));
}

// Walks the union grid of f and g, calling emit(lo, hi, vf, vg) per overlap cell.
template <typename Emit>
void walk_pair(const StepFn& f, const StepFn& g, Emit&& emit) {
  const auto& bf = f.breakpoints();
  const auto& bg = g.breakpoints();
  std::size_t i = 0;
  std::size_t j = 0;
  const Rational* lo = &bf[0];
  while (i < f.cells() && j < g.cells()) {
    const Rational& hf = bf[i + 1];
    const Rational& hg = bg[j + 1];
    const auto c = hf <=> hg;
    const Rational& hi = c < 0 ? hf : hg;
    emit(*lo, hi, f.values()[i], g.values()[j]);
    lo = &hi;
    if (c <= 0) ++i;
    if (c >= 0) ++j;
  }
}

template <typename Op>
StepFn combine(const StepFn& f, const StepFn& g, Op&& op) {
  std::vector<Rational> grid;
  std::vector<Rational> values;
  grid.reserve(f.cells() + g.cells() + 1);
  values.reserve(f.cells() + g.cells());
  grid.push_back(Rational(0));
  walk_pair(f, g, [&](const Rational&, const Rational& hi, const Rational& vf, const Rational& vg) {
    grid.push_back(hi);
    values.push_back(op(vf, vg));
  });
  return from_strict_grid(std::move(grid), std::move(values));
}

}  // namespace

StepFn::StepFn() : breakpoints_{Rational(0), Rational(1)}, values_{Rational(0)} {}

StepFn StepFn::constant(Rational c) { return StepFn({Rational(0), Rational(1)}, {std::move(c)}); }

StepFn StepFn::indicator(const Rational& lo, const Rational& hi) {
  if (!(Rational(0) <= lo && lo < hi && hi <= Rational(1))) {
    throw StructuralError("indicator needs 0 <= lo < hi <= 1, got [" + lo.str() + ", " + hi.str() + ")");
  }
  return canonicalize({Rational(0), lo, hi, Rational(1)}, {Rational(0), Rational(1), Rational(0)});
}

const Rational& StepFn::operator()(const Rational& t) const {
  if (t < Rational(0) || t >= Rational(1)) throw DomainError("evaluation point outside [0,1): " + t.str());
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

StepFn canonicalize(std::vector<Rational> breakpoints, std::vector<Rational> values) {
  if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size()) {
    throw StructuralError("step function needs m+1 breakpoints for m values (got " +
                          std::to_string(breakpoints.size()) + " breakpoints, " + std::to_string(values.size()) +
                          " values)");
  }
  if (breakpoints.front() != Rational(0) || breakpoints.back() != Rational(1)) {
    throw StructuralError("breakpoints must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] < breakpoints[i]) {
      throw StructuralError("breakpoints not sorted at index " + std::to_string(i + 1));
    }
  }

  // breakpoints[out] is always the right edge of the kept cells, which is the
  // left edge of cell i.
  std::size_t out = 0;  // number of cells kept
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[out]) continue;
    if (out > 0 && values[out - 1] == values[i]) {
      breakpoints[out] = breakpoints[i + 1];
      continue;
    }
    if (out != i) {
      values[out] = std::move(values[i]);
      breakpoints[out + 1] = std::move(breakpoints[i + 1]);
    }
    ++out;
  }
  values.resize(out);
  breakpoints.resize(out + 1);
  return StepFn(std::move(breakpoints), std::move(values));
}

std::vector<Rational> merged_grid(std::span<const StepFn* const> fs) {
  std::vector<Rational> grid;
  for (const StepFn* f : fs) grid.insert(grid.end(), f->breakpoints().begin(), f->breakpoints().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<Rational> sample_on(const StepFn& f, std::span<const Rational> grid) {
  std::vector<Rational> out;
  out.reserve(grid.size() - 1);
  std::size_t i = 0;
  for (std::size_t c = 0; c + 1 < grid.size(); ++c) {
    while (f.breakpoints()[i + 1] <= grid[c]) ++i;
    if (f.breakpoints()[i + 1] < grid[c + 1]) throw StructuralError("grid does not refine the function");
    out.push_back(f.values()[i]);
  }
  return out;
}

Refinement common_refinement(std::span<const StepFn> fs) {
  if (fs.empty()) throw StructuralError("common refinement of an empty list");
  std::vector<const StepFn*> ptrs;
  ptrs.reserve(fs.size());
  for (const StepFn& f : fs) ptrs.push_back(&f);
  Refinement r;
  r.grid = merged_grid(ptrs);
  r.values.reserve(fs.size());
  for (const StepFn& f : fs) r.values.push_back(sample_on(f, r.grid));
  return r;
}

StepFn lin_comb(std::span<const Term> terms) {
  if (terms.empty()) return StepFn();
  if (terms.size() == 1) return terms[0].coeff * *terms[0].fn;
  if (terms.size() == 2) {
    // c0*f0 + c1*f1 without materialising the refinement
    const Term& t0 = terms[0];
    const Term& t1 = terms[1];
    return combine(*t0.fn, *t1.fn,
                   [&](const Rational& a, const Rational& b) { return t0.coeff * a + t1.coeff * b; });
  }
  std::vector<const StepFn*> ptrs;
  ptrs.reserve(terms.size());
  for (const Term& t : terms) ptrs.push_back(t.fn);
  std::vector<Rational> grid = merged_grid(ptrs);
  std::vector<Rational> values(grid.size() - 1);
  for (const Term& t : terms) {
    if (t.coeff.is_zero()) continue;
    std::size_t i = 0;
    for (std::size_t c = 0; c < values.size(); ++c) {
      while (t.fn->breakpoints()[i + 1] <= grid[c]) ++i;
      values[c] += t.coeff * t.fn->values()[i];
    }
  }
  return from_strict_grid(std::move(grid), std::move(values));
}

StepFn pointwise_mul(const StepFn& f, const StepFn& g) {
  return combine(f, g, [](const Rational& a, const Rational& b) { return a * b; });
}

StepFn operator+(const StepFn& f, const StepFn& g) {
  return combine(f, g, [](const Rational& a, const Rational& b) { return a + b; });
}

StepFn operator-(const StepFn& f, const StepFn& g) {
  return combine(f, g, [](const Rational& a, const Rational& b) { return a - b; });
}

StepFn operator*(const Rational& c, const StepFn& f) {
  if (c.is_zero()) return StepFn();
  std::vector<Rational> values;
  values.reserve(f.cells());
  for (const Rational& v : f.values()) values.push_back(c * v);
  return canonicalize(f.breakpoints(), std::move(values));
}

StepFn axpy(const StepFn& f, const Rational& c, const StepFn& g) {
  if (c.is_zero()) return f;
  return combine(f, g, [&](const Rational& a, const Rational& b) { return a + c * b; });
}

Rational trace(const StepFn& f) {
  Rational sum;
  for (std::size_t i = 0; i < f.cells(); ++i) sum += f.values()[i] * f.cell_length(i);
  return sum;
}

Rational inner(const StepFn& f, const StepFn& g) {
  Rational sum;
  walk_pair(f, g, [&](const Rational& lo, const Rational& hi, const Rational& vf, const Rational& vg) {
    if (vf.is_zero() || vg.is_zero()) return;
    sum += vf * vg * (hi - lo);
  });
  return sum;
}

Rational norm2_sq(const StepFn& f) {
  Rational sum;
  for (std::size_t i = 0; i < f.cells(); ++i) sum += f.values()[i] * f.values()[i] * f.cell_length(i);
  return sum;
}

Rational norm_inf(const StepFn& f) {
  Rational m;
  for (const Rational& v : f.values()) {
    Rational a = abs(v);
    if (a > m) m = std::move(a);
  }
  return m;
}

std::vector<std::vector<Rational>> gram(std::span<const StepFn> fs) {
  std::vector<std::vector<Rational>> g(fs.size(), std::vector<Rational>(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i; j < fs.size(); ++j) {
      g[i][j] = inner(fs[i], fs[j]);
      if (j != i) g[j][i] = g[i][j];
    }
  }
  return g;
}

std::size_t first_non_unitary_cell(const StepFn& f) {
  const Rational one(1);
  const Rational minus_one(-1);
  for (std::size_t i = 0; i < f.cells(); ++i) {
    if (f.values()[i] != one && f.values()[i] != minus_one) return i;
  }
  return f.cells();
}

SAUnitaryFn::SAUnitaryFn(StepFn f) : fn_(std::move(f)) {
  const std::size_t bad = first_non_unitary_cell(fn_);
  if (bad != fn_.cells()) {
    throw DomainError("value " + fn_.values()[bad].str() + " on cell " + std::to_string(bad) +
                      " is not +-1");
  }
}

ProjectionFn::ProjectionFn(StepFn f) : fn_(std::move(f)) {
  for (std::size_t i = 0; i < fn_.cells(); ++i) {
    const Rational& v = fn_.values()[i];
    if (!v.is_zero() && v != Rational(1)) {
      throw DomainError("value " + v.str() + " on cell " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

SAUnitaryFn ProjectionFn::to_unitary() const {
  std::vector<Rational> values;
  values.reserve(fn_.cells());
  for (const Rational& v : fn_.values()) values.push_back(v.is_zero() ? Rational(-1) : Rational(1));
  return SAUnitaryFn(canonicalize(fn_.breakpoints(), std::move(values)));
}

}  // namespace sau
