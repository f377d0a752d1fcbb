#include "sau/lyapunov.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sau/errors.hpp"

namespace sau {
namespace {

// Moves the fractions t to a vertex of the constraint polytope while keeping
// every weighted column sum fixed. columns[j] = len_j * (g_1(j), ..., g_R(j)).
//
// Keeps T (R x R, invertible) such that T * [columns of the active set] has the
// identity on the pivot rows and zeros elsewhere; testing a new column and
// exchanging one basis column are O(R^2).
class VertexReducer {
 public:
  explicit VertexReducer(std::size_t rows) : rows_(rows), transform_(rows, std::vector<Rational>(rows)) {
    for (std::size_t i = 0; i < rows_; ++i) transform_[i][i] = Rational(1);
    pivot_col_.assign(rows_, kNone);
  }

  void reduce(const std::vector<std::vector<Rational>>& columns, std::vector<Rational>& t) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (is_bound(t[c])) continue;
      std::vector<Rational> w = apply(columns[c]);
      const std::optional<std::size_t> free_row = first_free_nonzero(w);
      if (free_row) {
        pivot(*free_row, w);
        pivot_col_[*free_row] = c;
        continue;
      }
      // columns[c] = sum_r w[r] * columns[pivot_col_[r]]: move along
      // d = e_c - sum_r w[r] e_{pivot_col_[r]} until some coordinate hits 0 or 1.
      std::optional<Rational> theta = step_limit(t[c], Rational(1));
      for (std::size_t r = 0; r < rows_; ++r) {
        if (pivot_col_[r] == kNone || w[r].is_zero()) continue;
        const Rational lim = step_limit(t[pivot_col_[r]], -w[r]).value();
        if (!theta || lim < *theta) theta = lim;
      }
      t[c] += *theta;
      std::optional<std::size_t> exchange_row;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (pivot_col_[r] == kNone || w[r].is_zero()) continue;
        Rational& tr = t[pivot_col_[r]];
        tr -= *theta * w[r];
        if (is_bound(tr)) {
          if (!exchange_row && !is_bound(t[c])) {
            exchange_row = r;
          } else {
            pivot_col_[r] = kNone;
          }
        }
      }
      if (exchange_row) {
        pivot(*exchange_row, w);
        pivot_col_[*exchange_row] = c;
      }
    }
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  static bool is_bound(const Rational& x) { return x.is_zero() || x == Rational(1); }

  // Largest theta >= 0 with x + theta * d in [0, 1]; nullopt when d = 0.
  static std::optional<Rational> step_limit(const Rational& x, const Rational& d) {
    if (d.sign() > 0) return (Rational(1) - x) / d;
    if (d.sign() < 0) return -x / d;
    return std::nullopt;
  }

  std::vector<Rational> apply(const std::vector<Rational>& v) const {
    std::vector<Rational> w(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t k = 0; k < rows_; ++k) {
        if (!transform_[i][k].is_zero() && !v[k].is_zero()) w[i] += transform_[i][k] * v[k];
      }
    }
    return w;
  }

  std::optional<std::size_t> first_free_nonzero(const std::vector<Rational>& w) const {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (pivot_col_[r] == kNone && !w[r].is_zero()) return r;
    }
    return std::nullopt;
  }

  // Row operations on transform_ turning w into the unit vector e_row.
  void pivot(std::size_t row, const std::vector<Rational>& w) {
    const Rational inv = Rational(1) / w[row];
    for (Rational& x : transform_[row]) x *= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row || w[i].is_zero()) continue;
      for (std::size_t k = 0; k < rows_; ++k) {
        if (!transform_[row][k].is_zero()) transform_[i][k] -= w[i] * transform_[row][k];
      }
    }
  }

  std::size_t rows_;
  std::vector<std::vector<Rational>> transform_;
  std::vector<std::size_t> pivot_col_;
};

StepFn materialize(const std::vector<Rational>& grid, const std::vector<Rational>& t) {
  std::vector<Rational> bp{grid.front()};
  std::vector<Rational> values;
  bp.reserve(2 * grid.size());
  values.reserve(2 * t.size());
  for (std::size_t c = 0; c < t.size(); ++c) {
    if (t[c] == Rational(1) || t[c].is_zero()) {
      values.emplace_back(t[c]);
      bp.push_back(grid[c + 1]);
      continue;
    }
    bp.push_back(grid[c] + t[c] * (grid[c + 1] - grid[c]));
    values.emplace_back(1);
    bp.push_back(grid[c + 1]);
    values.emplace_back(0);
  }
  return canonicalize(std::move(bp), std::move(values));
}

}  // namespace

std::string_view to_string(SplitRule rule) {
  switch (rule) {
    case SplitRule::cellwise:
      return "cellwise";
    case SplitRule::vertex:
      return "vertex";
  }
  return "?";
}

SplitRule split_rule_from_string(std::string_view name) {
  if (name == "cellwise") return SplitRule::cellwise;
  if (name == "vertex") return SplitRule::vertex;
  throw DomainError("unknown split rule \"" + std::string(name) + "\"");
}

ProjectionFn extract_projection(const StepFn& q, std::span<const StepFn> constraints, const LyapunovOptions& opts) {
  for (std::size_t i = 0; i < q.cells(); ++i) {
    const Rational& v = q.values()[i];
    if (v.sign() < 0 || v > Rational(1)) {
      throw DomainError("q = " + v.str() + " outside [0,1] on cell " + std::to_string(i));
    }
  }
  std::vector<const StepFn*> fns{&q};
  for (const StepFn& g : constraints) fns.push_back(&g);
  const std::vector<Rational> grid = merged_grid(fns);
  std::vector<Rational> t = sample_on(q, grid);

  if (opts.rule == SplitRule::vertex && !constraints.empty()) {
    const std::size_t cells = grid.size() - 1;
    std::vector<std::vector<Rational>> columns(cells, std::vector<Rational>(constraints.size()));
    for (std::size_t r = 0; r < constraints.size(); ++r) {
      const std::vector<Rational> g = sample_on(constraints[r], grid);
      for (std::size_t c = 0; c < cells; ++c) columns[c][r] = g[c] * (grid[c + 1] - grid[c]);
    }
    VertexReducer(constraints.size()).reduce(columns, t);
  }

  StepFn p = materialize(grid, t);
  if (p.cells() > opts.cell_ceiling) {
    throw CeilingError("projection has " + std::to_string(p.cells()) + " cells, ceiling is " +
                           std::to_string(opts.cell_ceiling),
                       p.cells(), opts.cell_ceiling);
  }
  return ProjectionFn(std::move(p));
}

NormingUnitary norming_unitary(const StepFn& a, const OrthoFamily& fam, const LyapunovOptions& opts) {
  if (a.is_zero()) throw DomainError("norming unitary of the zero function");
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const Rational ip = inner(a, fam[i]);
    if (!ip.is_zero()) {
      throw InputError("target not orthogonal to family member " + std::to_string(i) + ": inner = " + ip.str());
    }
  }
  const Rational a_inf = norm_inf(a);
  const Rational a_sq = norm2_sq(a);

  // q = (1 + a/|a|_inf) / 2
  const Rational half = Rational(1, 2);
  const StepFn q = axpy(StepFn::constant(half), half / a_inf, a);

  std::vector<StepFn> constraints = fam.members();
  constraints.push_back(a);
  SAUnitaryFn u = extract_projection(q, constraints, opts).to_unitary();

  Rational alpha = inner(a, u.fn());
  if (alpha * a_inf != a_sq) {
    throw CertificateError("norming identity failed: alpha = " + alpha.str() + ", |a|_2^2 = " + a_sq.str() +
                           ", |a|_inf = " + a_inf.str());
  }
  for (std::size_t i = 0; i < fam.size(); ++i) {
    if (!inner(u.fn(), fam[i]).is_zero()) {
      throw CertificateError("norming unitary not orthogonal to member " + std::to_string(i));
    }
  }
  return {std::move(u), std::move(alpha)};
}

}  // namespace sau
