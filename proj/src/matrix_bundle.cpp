#include "sau/matrix_bundle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sau/errors.hpp"
#include "sau/parallel.hpp"

namespace sau::bundle {
namespace {

// Eigenvalues of q within this distance of 0 or 1 are treated as exactly 0 or 1,
// so rounding never creates slivers of relative width ~1e-16.
constexpr double kSnap = 1e-13;

// Entries below this magnitude are skipped when fixing eigenvector phases.
constexpr double kPhaseFloor = 1e-12;

bool same_matrix(const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a == b; }

template <typename Emit>
void walk_pair(const MatStepFn& x, const MatStepFn& y, Emit&& emit) {
  const auto& bx = x.breakpoints();
  const auto& by = y.breakpoints();
  std::size_t i = 0;
  std::size_t j = 0;
  const Rational* lo = &bx[0];
  while (i < x.cell_count() && j < y.cell_count()) {
    const auto c = bx[i + 1] <=> by[j + 1];
    const Rational& hi = c < 0 ? bx[i + 1] : by[j + 1];
    emit(*lo, hi, x.cells()[i], y.cells()[j]);
    lo = &hi;
    if (c <= 0) ++i;
    if (c >= 0) ++j;
  }
}

template <typename Op>
MatStepFn combine(const MatStepFn& x, const MatStepFn& y, Op&& op) {
  if (x.n() != y.n()) {
    throw StructuralError("dimension mismatch: " + std::to_string(x.n()) + " vs " + std::to_string(y.n()));
  }
  std::vector<Rational> grid{Rational(0)};
  std::vector<Matrix> cells;
  walk_pair(x, y, [&](const Rational&, const Rational& hi, const Matrix& a, const Matrix& b) {
    grid.push_back(hi);
    cells.push_back(op(a, b));
  });
  return MatStepFn::from_cells(std::move(grid), std::move(cells));
}

// Cells of f re-expressed on a refining grid.
std::vector<const Matrix*> sample_on(const MatStepFn& f, const std::vector<Rational>& grid) {
  std::vector<const Matrix*> out;
  out.reserve(grid.size() - 1);
  std::size_t i = 0;
  for (std::size_t c = 0; c + 1 < grid.size(); ++c) {
    while (f.breakpoints()[i + 1] <= grid[c]) ++i;
    out.push_back(&f.cells()[i]);
  }
  return out;
}

double max_over_cells(const MatStepFn& x, auto&& per_cell) {
  double worst = 0.0;
  for (const Matrix& m : x.cells()) worst = std::max(worst, per_cell(m));
  return worst;
}

void require_dimension(std::size_t n) {
  if (n == 0 || n > kMaxDimension) {
    throw DomainError("matrix dimension must be in [1, " + std::to_string(kMaxDimension) + "], got " +
                      std::to_string(n));
  }
}

void check_orthonormal(std::span<const MatStepFn> fam, double tol) {
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (std::size_t j = i; j < fam.size(); ++j) {
      const double ip = nc_inner(fam[i], fam[j]);
      if (std::abs(ip - (i == j ? 1.0 : 0.0)) > tol) {
        throw InputError("family not orthonormal within " + std::to_string(tol) + ": <e" + std::to_string(i) +
                         ", e" + std::to_string(j) + "> = " + std::to_string(ip));
      }
    }
  }
}

}  // namespace

MatStepFn::MatStepFn(std::size_t n)
    : n_(n), breakpoints_{Rational(0), Rational(1)}, cells_{Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))} {
  require_dimension(n);
}

MatStepFn MatStepFn::constant(const Matrix& m) {
  if (m.rows() != m.cols()) throw StructuralError("cell matrix must be square");
  return from_cells({Rational(0), Rational(1)}, {m});
}

MatStepFn MatStepFn::identity(std::size_t n) {
  require_dimension(n);
  return constant(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

MatStepFn MatStepFn::tensor(const StepFn& f, const Matrix& m) {
  std::vector<Matrix> cells;
  cells.reserve(f.cells());
  for (const Rational& v : f.values()) cells.push_back(v.to_double() * m);
  return from_cells(f.breakpoints(), std::move(cells));
}

MatStepFn MatStepFn::from_cells(std::vector<Rational> breakpoints, std::vector<Matrix> cells) {
  if (cells.empty() || breakpoints.size() != cells.size() + 1) {
    throw StructuralError("matrix step function needs m+1 breakpoints for m cells");
  }
  if (breakpoints.front() != Rational(0) || breakpoints.back() != Rational(1)) {
    throw StructuralError("breakpoints must start at 0 and end at 1");
  }
  const auto n = static_cast<std::size_t>(cells.front().rows());
  require_dimension(n);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (static_cast<std::size_t>(cells[i].rows()) != n || static_cast<std::size_t>(cells[i].cols()) != n) {
      throw StructuralError("cell " + std::to_string(i) + " is not " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (breakpoints[i + 1] < breakpoints[i]) {
      throw StructuralError("breakpoints not sorted at index " + std::to_string(i + 1));
    }
  }
  MatStepFn out(n);
  out.breakpoints_.assign(1, Rational(0));
  out.cells_.clear();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    if (!out.cells_.empty() && same_matrix(out.cells_.back(), cells[i])) {
      out.breakpoints_.back() = std::move(breakpoints[i + 1]);
      continue;
    }
    out.cells_.push_back(std::move(cells[i]));
    out.breakpoints_.push_back(std::move(breakpoints[i + 1]));
  }
  return out;
}

double MatStepFn::cell_length(std::size_t i) const { return (breakpoints_[i + 1] - breakpoints_[i]).to_double(); }

bool operator==(const MatStepFn& a, const MatStepFn& b) {
  if (a.n_ != b.n_ || a.breakpoints_ != b.breakpoints_) return false;
  for (std::size_t i = 0; i < a.cells_.size(); ++i) {
    if (!same_matrix(a.cells_[i], b.cells_[i])) return false;
  }
  return true;
}

MatStepFn axpy(const MatStepFn& x, double c, const MatStepFn& y) {
  if (c == 0.0) return x;
  return combine(x, y, [c](const Matrix& a, const Matrix& b) -> Matrix { return a + c * b; });
}

MatStepFn scale(double c, const MatStepFn& x) {
  std::vector<Matrix> cells;
  cells.reserve(x.cell_count());
  for (const Matrix& m : x.cells()) cells.push_back(c * m);
  return MatStepFn::from_cells(x.breakpoints(), std::move(cells));
}

MatStepFn lin_comb(std::span<const double> coeffs, std::span<const MatStepFn> fns) {
  if (fns.empty()) throw StructuralError("empty linear combination");
  MatStepFn out(fns.front().n());
  for (std::size_t i = 0; i < fns.size(); ++i) out = axpy(out, coeffs[i], fns[i]);
  return out;
}

MatStepFn multiply(const MatStepFn& x, const MatStepFn& y) {
  return combine(x, y, [](const Matrix& a, const Matrix& b) -> Matrix { return a * b; });
}

Complex nc_trace_complex(const MatStepFn& x) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < x.cell_count(); ++i) sum += x.cell_length(i) * x.cells()[i].trace();
  return sum / static_cast<double>(x.n());
}

double nc_trace(const MatStepFn& x) { return nc_trace_complex(x).real(); }

double nc_inner(const MatStepFn& x, const MatStepFn& y) {
  if (x.n() != y.n()) throw StructuralError("dimension mismatch in inner product");
  double sum = 0.0;
  walk_pair(x, y, [&](const Rational& lo, const Rational& hi, const Matrix& a, const Matrix& b) {
    // Re tr(a* b) = sum_ij Re(conj(a_ij) b_ij)
    sum += (hi - lo).to_double() * (a.conjugate().cwiseProduct(b)).sum().real();
  });
  return sum / static_cast<double>(x.n());
}

double nc_norm2_sq(const MatStepFn& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.cell_count(); ++i) sum += x.cell_length(i) * x.cells()[i].squaredNorm();
  return sum / static_cast<double>(x.n());
}

double nc_norm_inf(const MatStepFn& x) {
  return max_over_cells(x, [](const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  });
}

double hermiticity_defect(const MatStepFn& x) {
  return max_over_cells(x, [](const Matrix& m) { return (m - m.adjoint()).norm(); });
}

double projection_defect(const MatStepFn& x) {
  return max_over_cells(x, [](const Matrix& m) { return (m * m - m).norm(); });
}

double involution_defect(const MatStepFn& x) {
  return max_over_cells(x, [](const Matrix& m) {
    return (m * m - Matrix::Identity(m.rows(), m.cols())).norm();
  });
}

MatStepFn nc_extract_projection(const MatStepFn& q, std::span<const MatStepFn> constraints, const Tolerances& tol) {
  std::vector<Rational> grid = q.breakpoints();
  for (const MatStepFn& g : constraints) {
    if (g.n() != q.n()) throw StructuralError("constraint dimension differs from q");
    grid.insert(grid.end(), g.breakpoints().begin(), g.breakpoints().end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const std::vector<const Matrix*> qcells = sample_on(q, grid);
  const auto n = static_cast<Eigen::Index>(q.n());

  std::vector<Rational> out_bp{Rational(0)};
  std::vector<Matrix> out_cells;
  for (std::size_t c = 0; c + 1 < grid.size(); ++c) {
    const Matrix& qc = *qcells[c];
    if ((qc - qc.adjoint()).norm() > tol.alg) {
      throw DomainError("q is not Hermitian on cell " + std::to_string(c));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(qc);
    if (es.info() != Eigen::Success) throw ToleranceError("eigensolver failed on cell " + std::to_string(c));

    // descending eigenvalues, fixed phases
    std::vector<double> d(static_cast<std::size_t>(n));
    Matrix v(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index src = n - 1 - j;
      double lambda = es.eigenvalues()(src);
      if (lambda < -tol.eig || lambda > 1.0 + tol.eig) {
        throw DomainError("eigenvalue " + std::to_string(lambda) + " of q outside [0,1] on cell " + std::to_string(c));
      }
      lambda = std::clamp(lambda, 0.0, 1.0);
      if (lambda < kSnap) lambda = 0.0;
      if (lambda > 1.0 - kSnap) lambda = 1.0;
      d[static_cast<std::size_t>(j)] = lambda;
      Eigen::VectorXcd vec = es.eigenvectors().col(src);
      for (Eigen::Index r = 0; r < n; ++r) {
        if (std::abs(vec(r)) > kPhaseFloor) {
          vec *= std::conj(vec(r)) / std::abs(vec(r));
          break;
        }
      }
      v.col(j) = vec;
    }

    std::vector<double> cuts;
    for (double x : d) {
      if (x > 0.0 && x < 1.0) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(1.0);

    const Rational lo = grid[c];
    const Rational len = grid[c + 1] - grid[c];
    for (double end : cuts) {
      Matrix p = Matrix::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (d[static_cast<std::size_t>(j)] >= end) p += v.col(j) * v.col(j).adjoint();
      }
      out_cells.push_back(std::move(p));
      out_bp.push_back(end == 1.0 ? grid[c + 1] : lo + Rational::from_double(end) * len);
    }
  }
  MatStepFn p = MatStepFn::from_cells(std::move(out_bp), std::move(out_cells));

  const double pdef = projection_defect(p);
  if (pdef > tol.alg) throw ToleranceError("|P^2 - P|_F = " + std::to_string(pdef) + " exceeds tol_alg");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const double diff = std::abs(nc_inner(constraints[i], p) - nc_inner(constraints[i], q));
    if (diff > tol.match) {
      throw ToleranceError("constraint " + std::to_string(i) + " matched only to " + std::to_string(diff));
    }
  }
  return p;
}

NcNormingUnitary nc_norming_unitary(const MatStepFn& a, std::span<const MatStepFn> fam, const Tolerances& tol) {
  const double a_inf = nc_norm_inf(a);
  if (a_inf == 0.0) throw DomainError("norming unitary of the zero function");
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double ip = nc_inner(a, fam[i]);
    if (std::abs(ip) > tol.match) {
      throw InputError("target not orthogonal to family member " + std::to_string(i) + ": inner = " +
                       std::to_string(ip));
    }
  }
  const double a_sq = nc_norm2_sq(a);
  const std::size_t n = a.n();
  const MatStepFn half_identity = scale(0.5, MatStepFn::identity(n));
  const MatStepFn q = axpy(half_identity, 0.5 / a_inf, a);

  std::vector<MatStepFn> constraints(fam.begin(), fam.end());
  constraints.push_back(a);
  const MatStepFn p = nc_extract_projection(q, constraints, tol);
  MatStepFn u = axpy(scale(2.0, p), -1.0, MatStepFn::identity(n));

  NcNormingUnitary out{std::move(u), 0.0};
  out.alpha = nc_inner(a, out.u);
  if (std::abs(out.alpha - a_sq / a_inf) > tol.match) {
    throw ToleranceError("norming identity off by " + std::to_string(std::abs(out.alpha - a_sq / a_inf)));
  }
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double ip = nc_inner(out.u, fam[i]);
    if (std::abs(ip) > tol.match) {
      throw ToleranceError("unitary not orthogonal to member " + std::to_string(i) + ": " + std::to_string(ip));
    }
  }
  const double idef = involution_defect(out.u);
  if (idef > tol.alg) throw ToleranceError("|U^2 - I|_F = " + std::to_string(idef) + " exceeds tol_alg");
  return out;
}

NcPursuitResult nc_pursue(const MatStepFn& a, std::span<const MatStepFn> fam, const Rational& epsilon,
                          const NcOptions& opts) {
  if (epsilon.sign() <= 0) throw DomainError("epsilon must be positive, got " + epsilon.str());
  check_orthonormal(fam, opts.tol.match);

  NcPursuitResult result;
  MatStepFn residual = a;
  for (const MatStepFn& e : fam) {
    result.projection_coeffs.push_back(nc_inner(e, a));
    residual = axpy(residual, -result.projection_coeffs.back(), e);
  }
  NcPursuitTrace& trace = result.trace;
  trace.epsilon = epsilon;
  trace.norm2_sq_initial = nc_norm2_sq(residual);
  trace.norm_inf_initial = nc_norm_inf(residual);
  const double eps_sq = epsilon.to_double() * epsilon.to_double();
  if (trace.norm2_sq_initial >= eps_sq) {
    trace.iteration_bound = iteration_bound(Rational::from_double(trace.norm2_sq_initial),
                                            Rational::from_double(trace.norm_inf_initial), epsilon);
  }

  std::vector<MatStepFn> extended(fam.begin(), fam.end());
  double current = trace.norm2_sq_initial;
  while (current >= eps_sq) {
    if (trace.iterations.size() >= trace.iteration_bound) {
      throw ToleranceError("pursuit exceeded its iteration bound " + std::to_string(trace.iteration_bound));
    }
    NcNormingUnitary nu = nc_norming_unitary(residual, extended, opts.tol);
    residual = axpy(residual, -nu.alpha, nu.u);
    if (residual.cell_count() > opts.cell_ceiling) {
      throw CeilingError("residual has " + std::to_string(residual.cell_count()) + " cells",
                         residual.cell_count(), opts.cell_ceiling);
    }
    NcPursuitStep step;
    step.k = trace.iterations.size() + 1;
    step.alpha = nu.alpha;
    step.norm2_sq_after = nc_norm2_sq(residual);
    step.norm_inf_after = nc_norm_inf(residual);
    const double drift = std::abs(step.norm2_sq_after - (current - step.alpha * step.alpha));
    if (drift > opts.tol.energy) {
      throw ToleranceError("energy identity violated at step " + std::to_string(step.k) + ": |a_k|^2 = " +
                           std::to_string(step.norm2_sq_after) + ", expected " +
                           std::to_string(current - step.alpha * step.alpha));
    }
    extended.push_back(nu.u);
    step.unit = std::move(nu.u);
    current = step.norm2_sq_after;
    trace.iterations.push_back(std::move(step));
  }
  result.residual = std::move(residual);
  return result;
}

bool NcCertificate::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const NcCheck& c) { return c.pass; });
}

NcCertificate nc_certify_pursuit(const MatStepFn& a, std::span<const MatStepFn> fam, const NcPursuitResult& result,
                                 const Tolerances& tol) {
  NcCertificate cert;
  const auto& steps = result.trace.iterations;
  const auto add = [&](std::string name, double worst, double limit) {
    cert.checks.push_back({std::move(name), worst <= limit, worst});
  };

  double energy = 0.0, sup = 0.0, cauchy = 0.0, alg = 0.0, herm = 0.0;
  double prev = result.trace.norm2_sq_initial;
  double sum_sq = 0.0, sum_abs = 0.0;
  for (const NcPursuitStep& s : steps) {
    energy = std::max(energy, std::abs(s.norm2_sq_after - (prev - s.alpha * s.alpha)));
    sum_sq += s.alpha * s.alpha;
    sum_abs += std::abs(s.alpha);
    sup = std::max(sup, s.norm_inf_after - (result.trace.norm_inf_initial + sum_abs));
    cauchy = std::max(cauchy, sum_abs * sum_abs - static_cast<double>(s.k) * sum_sq);
    alg = std::max(alg, involution_defect(s.unit));
    herm = std::max(herm, hermiticity_defect(s.unit));
    prev = s.norm2_sq_after;
  }
  add("energy identity", energy, tol.energy);
  add("sum alpha^2 <= |a0|_2^2", sum_sq - result.trace.norm2_sq_initial,
      tol.energy * static_cast<double>(std::max<std::size_t>(1, steps.size())));
  add("|a_k|_inf <= |a0|_inf + sum|alpha|", sup, tol.match);
  add("(sum|alpha|)^2 <= k sum alpha^2", cauchy, tol.match);
  add("|U^2 - I|_F", alg, tol.alg);
  add("|U - U*|_F", herm, tol.alg);

  double ortho = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (std::size_t j = i; j < steps.size(); ++j) {
      ortho = std::max(ortho, std::abs(nc_inner(steps[i].unit, steps[j].unit) - (i == j ? 1.0 : 0.0)));
    }
    for (const MatStepFn& e : fam) ortho = std::max(ortho, std::abs(nc_inner(steps[i].unit, e)));
    ortho = std::max(ortho, std::abs(nc_inner(result.residual, steps[i].unit)));
  }
  for (const MatStepFn& e : fam) ortho = std::max(ortho, std::abs(nc_inner(result.residual, e)));
  add("orthogonality ledger", ortho, tol.match);

  MatStepFn defect = axpy(a, -1.0, result.residual);
  for (std::size_t e = 0; e < fam.size(); ++e) defect = axpy(defect, -result.projection_coeffs[e], fam[e]);
  for (const NcPursuitStep& s : steps) defect = axpy(defect, -s.alpha, s.unit);
  add("decomposition", nc_norm_inf(defect), tol.match);

  const double eps = result.trace.epsilon.to_double();
  cert.checks.push_back({"|residual|_2 < epsilon", nc_norm2_sq(result.residual) < eps * eps,
                         nc_norm2_sq(result.residual)});
  cert.checks.push_back({"terminated within iteration_bound", steps.size() <= result.trace.iteration_bound,
                         static_cast<double>(steps.size())});
  return cert;
}

double nc_trace_vector_defect(const MatStepFn& u, std::span<const MatStepFn> xs) {
  double worst = 0.0;
  for (const MatStepFn& x : xs) {
    const Complex lhs = nc_trace_complex(multiply(multiply(u, x), u));
    worst = std::max(worst, std::abs(lhs - nc_trace_complex(x)));
  }
  return worst;
}

Matrix hermitian_unit(std::size_t n, std::size_t index) {
  require_dimension(n);
  if (index >= n * n) throw DomainError("hermitian unit index out of range");
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix m = Matrix::Zero(dim, dim);
  if (index < n) {
    m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return m;
  }
  std::size_t rest = index - n;
  const std::size_t pair = rest / 2;
  const bool imaginary = rest % 2 == 1;
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j + 1; k < dim; ++k, ++count) {
      if (count != pair) continue;
      if (imaginary) {
        m(j, k) = Complex(0.0, 1.0);
        m(k, j) = Complex(0.0, -1.0);
      } else {
        m(j, k) = 1.0;
        m(k, j) = 1.0;
      }
      return m;
    }
  }
  return m;
}

MatStepFn nc_dense_element(std::uint64_t j, std::size_t n) {
  const std::uint64_t units = n * n;
  return MatStepFn::tensor(dense_element(j / units), hermitian_unit(n, static_cast<std::size_t>(j % units)));
}

NcBasisState nc_initial_state(std::size_t n) {
  NcBasisState state;
  state.n = n;
  state.family.push_back(MatStepFn::identity(n));
  return state;
}

void nc_advance_stage(NcBasisState& state, const NcOptions& opts) {
  NcStageRecord rec;
  rec.m = state.stage_log.size() + 1;
  const PairIndex pair = pair_index(rec.m);
  rec.j = pair.j;
  rec.k = pair.k;
  const MatStepFn b = nc_dense_element(pair.j - 1, state.n);
  NcPursuitResult res;
  try {
    res = nc_pursue(b, state.family, Rational::pow2(-static_cast<long>(pair.k)), opts);
  } catch (const CeilingError& e) {
    throw StageError(e, rec.m);
  }
  for (NcPursuitStep& s : res.trace.iterations) state.family.push_back(std::move(s.unit));
  rec.units_added = res.trace.iterations.size();
  rec.residual_norm2_sq = nc_norm2_sq(res.residual);
  state.processed.insert(pair);
  state.stage_log.push_back(rec);
}

NcBasisState nc_run_stages(std::size_t n, std::uint64_t stages, const NcOptions& opts) {
  NcBasisState state = nc_initial_state(n);
  for (std::uint64_t m = 0; m < stages; ++m) nc_advance_stage(state, opts);
  return state;
}

NcVerifyReport nc_verify_basis(const NcBasisState& state, std::uint64_t j_max, std::uint64_t k_max,
                               const Tolerances& tol, unsigned jobs) {
  NcVerifyReport report;
  const auto& fam = state.family;
  const std::size_t r = fam.size();
  report.first_member_is_identity =
      r > 0 && fam.front().n() == state.n && nc_norm_inf(axpy(fam.front(), -1.0, MatStepFn::identity(state.n))) <= tol.alg;

  std::vector<double> row_err(r, 0.0);
  std::vector<std::size_t> row_col(r, 0);
  parallel_for(r, jobs, [&](std::size_t i) {
    for (std::size_t j = i; j < r; ++j) {
      const double err = std::abs(nc_inner(fam[i], fam[j]) - (i == j ? 1.0 : 0.0));
      if (err > row_err[i]) {
        row_err[i] = err;
        row_col[i] = j;
      }
    }
  });
  for (std::size_t i = 0; i < r; ++i) {
    if (row_err[i] > report.gram_max_error) {
      report.gram_max_error = row_err[i];
      report.gram_worst_row = i;
      report.gram_worst_col = row_col[i];
    }
  }
  report.gram_pass = report.gram_max_error <= tol.match;

  report.unitary_pass = true;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t c = 0; c < fam[i].cell_count(); ++c) {
      const Matrix& m = fam[i].cells()[c];
      const double defect = std::max((m - m.adjoint()).norm(), (m * m - Matrix::Identity(m.rows(), m.cols())).norm());
      if (defect > tol.alg) {
        report.unitary_pass = false;
        if (report.unitary_witnesses.size() < 16) report.unitary_witnesses.push_back({i, c, defect});
      }
    }
  }

  for (std::uint64_t j = 1; j <= j_max; ++j) {
    for (std::uint64_t k = 1; k <= k_max; ++k) {
      NcPairCertificate pc;
      pc.j = j;
      pc.k = k;
      pc.bound = std::ldexp(1.0, -2 * static_cast<int>(k));
      report.pairs.push_back(pc);
    }
  }
  parallel_for(report.pairs.size(), jobs, [&](std::size_t idx) {
    NcPairCertificate& pc = report.pairs[idx];
    if (!state.processed.contains(PairIndex{pc.j, pc.k})) return;
    MatStepFn res = nc_dense_element(pc.j - 1, state.n);
    const MatStepFn b = res;
    for (const MatStepFn& e : fam) res = axpy(res, -nc_inner(e, b), e);
    pc.distance_sq = nc_norm2_sq(res);
    pc.status = pc.distance_sq < pc.bound + tol.match ? PairStatus::pass : PairStatus::fail;
  });
  report.completeness_pass = std::none_of(report.pairs.begin(), report.pairs.end(),
                                          [](const auto& p) { return p.status == PairStatus::fail; });
  return report;
}

}  // namespace sau::bundle
