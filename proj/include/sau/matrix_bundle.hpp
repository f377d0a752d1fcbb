#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sau/basis_engine.hpp"
#include "sau/rational.hpp"
#include "sau/step_function.hpp"

// Matrix-valued step functions t -> M_n(C) on [0,1) with trace
// tau(x) = int (1/n) tr x(t) dt. Breakpoints stay exact rationals; cell
// entries are doubles, so every identity holds up to a tolerance.
namespace sau::bundle {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDimension = 8;

struct Tolerances {
  double eig = 1e-9;      // eigenvalues of q may leave [0,1] by this much
  double alg = 1e-10;     // |P^2 - P|_F, |U^2 - I|_F, hermiticity per cell
  double match = 1e-8;    // constraint matching, orthogonality
  double energy = 1e-8;   // per-step energy identity
};

class MatStepFn {
 public:
  // Zero function with n x n cells.
  explicit MatStepFn(std::size_t n = 1);

  static MatStepFn constant(const Matrix& m);
  static MatStepFn identity(std::size_t n);

  // f(t) * m
  static MatStepFn tensor(const StepFn& f, const Matrix& m);

  // Validates shape (StructuralError) and merges equal neighbours.
  static MatStepFn from_cells(std::vector<Rational> breakpoints, std::vector<Matrix> cells);

  std::size_t n() const { return n_; }
  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<Matrix>& cells() const { return cells_; }
  std::size_t cell_count() const { return cells_.size(); }
  double cell_length(std::size_t i) const;

  friend bool operator==(const MatStepFn& a, const MatStepFn& b);

 private:
  std::size_t n_;
  std::vector<Rational> breakpoints_;
  std::vector<Matrix> cells_;
};

// x + c*y on the common grid.
MatStepFn axpy(const MatStepFn& x, double c, const MatStepFn& y);
MatStepFn lin_comb(std::span<const double> coeffs, std::span<const MatStepFn> fns);
MatStepFn multiply(const MatStepFn& x, const MatStepFn& y);
MatStepFn scale(double c, const MatStepFn& x);

Complex nc_trace_complex(const MatStepFn& x);
double nc_trace(const MatStepFn& x);
// Re tau(x* y); equals tau(x y) for Hermitian x.
double nc_inner(const MatStepFn& x, const MatStepFn& y);
double nc_norm2_sq(const MatStepFn& x);
// Largest singular value over all cells.
double nc_norm_inf(const MatStepFn& x);

// Largest |X - X*|_F over cells.
double hermiticity_defect(const MatStepFn& x);
// Largest |X^2 - X|_F over cells.
double projection_defect(const MatStepFn& x);
// Largest |X^2 - I|_F over cells.
double involution_defect(const MatStepFn& x);

// Per cell: q = V diag(d) V*, each eigen-index j switched on over the left
// fraction d_j of the cell. Eigenvalues are sorted descending and each
// eigenvector's first non-negligible entry is made real positive.
MatStepFn nc_extract_projection(const MatStepFn& q, std::span<const MatStepFn> constraints,
                                const Tolerances& tol = {});

struct NcNormingUnitary {
  MatStepFn u;
  double alpha = 0.0;
};

NcNormingUnitary nc_norming_unitary(const MatStepFn& a, std::span<const MatStepFn> fam, const Tolerances& tol = {});

struct NcPursuitStep {
  std::size_t k = 0;
  double alpha = 0.0;
  MatStepFn unit;
  double norm2_sq_after = 0.0;
  double norm_inf_after = 0.0;
};

struct NcPursuitTrace {
  double norm2_sq_initial = 0.0;
  double norm_inf_initial = 0.0;
  Rational epsilon;
  std::uint64_t iteration_bound = 0;
  std::vector<NcPursuitStep> iterations;
};

struct NcPursuitResult {
  std::vector<double> projection_coeffs;
  NcPursuitTrace trace;
  MatStepFn residual;
};

struct NcOptions {
  Tolerances tol{};
  std::size_t cell_ceiling = std::numeric_limits<std::size_t>::max();
};

// Floating-point pursuit. Aborts with ToleranceError naming the failed
// inequality when a step leaves its tolerance.
NcPursuitResult nc_pursue(const MatStepFn& a, std::span<const MatStepFn> fam, const Rational& epsilon,
                          const NcOptions& opts = {});

struct NcCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // largest violation magnitude seen
};

struct NcCertificate {
  std::vector<NcCheck> checks;
  bool pass() const;
};

NcCertificate nc_certify_pursuit(const MatStepFn& a, std::span<const MatStepFn> fam, const NcPursuitResult& result,
                                 const Tolerances& tol = {});

// Largest |tau(u x u) - tau(x)| over xs.
double nc_trace_vector_defect(const MatStepFn& u, std::span<const MatStepFn> xs);

// Hermitian matrix units in fixed order: E_jj, then for j < k in
// lexicographic order E_jk + E_kj followed by i(E_jk - E_kj).
Matrix hermitian_unit(std::size_t n, std::size_t index);

// Dense sequence chi_I (x) unit: interval dense_element(j / n^2), unit j % n^2.
MatStepFn nc_dense_element(std::uint64_t j, std::size_t n);

struct NcStageRecord {
  std::uint64_t m = 0;
  std::uint64_t j = 0;
  std::uint64_t k = 0;
  std::size_t units_added = 0;
  double residual_norm2_sq = 0.0;
};

struct NcBasisState {
  std::size_t n = 1;
  std::vector<MatStepFn> family;  // member 0 is the identity
  std::vector<NcStageRecord> stage_log;
  std::set<PairIndex> processed;
};

NcBasisState nc_initial_state(std::size_t n);
void nc_advance_stage(NcBasisState& state, const NcOptions& opts = {});
NcBasisState nc_run_stages(std::size_t n, std::uint64_t stages, const NcOptions& opts = {});

struct NcPairCertificate {
  std::uint64_t j = 0;
  std::uint64_t k = 0;
  PairStatus status = PairStatus::not_certified;
  double distance_sq = 0.0;
  double bound = 0.0;
};

struct NcMemberWitness {
  std::size_t member = 0;
  std::size_t cell = 0;
  double defect = 0.0;
};

struct NcVerifyReport {
  bool first_member_is_identity = false;
  bool gram_pass = false;
  double gram_max_error = 0.0;
  std::size_t gram_worst_row = 0;
  std::size_t gram_worst_col = 0;
  bool unitary_pass = false;
  std::vector<NcMemberWitness> unitary_witnesses;
  std::vector<NcPairCertificate> pairs;
  bool completeness_pass = false;

  bool pass() const { return first_member_is_identity && gram_pass && unitary_pass && completeness_pass; }
};

// Toleranced counterpart of verify_basis: Gram entries within tol.match,
// members Hermitian with U^2 = I within tol.alg, and dist^2 < 4^-k + tol.match.
NcVerifyReport nc_verify_basis(const NcBasisState& state, std::uint64_t j_max, std::uint64_t k_max,
                               const Tolerances& tol = {}, unsigned jobs = 1);

}  // namespace sau::bundle
