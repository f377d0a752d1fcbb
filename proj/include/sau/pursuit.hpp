#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sau/lyapunov.hpp"
#include "sau/ortho_family.hpp"
#include "sau/rational.hpp"
#include "sau/step_function.hpp"

namespace sau {

struct PursuitStep {
  std::size_t k = 0;  // 1-based
  Rational alpha;
  SAUnitaryFn unit = SAUnitaryFn::one();
  Rational norm2_sq_after;
  Rational norm_inf_after;
};

struct PursuitTrace {
  Rational norm2_sq_initial;  // |a_0|_2^2
  Rational norm_inf_initial;  // |a_0|_inf
  Rational epsilon;
  std::uint64_t iteration_bound = 0;
  std::vector<PursuitStep> iterations;
};

struct PursuitResult {
  std::vector<Rational> projection_coeffs;  // <a, e_i> for the input family
  PursuitTrace trace;
  StepFn residual;

  std::vector<SAUnitaryFn> units() const;
};

struct PursuitOptions {
  LyapunovOptions lyapunov{};
  // Called after each iteration; useful for progress logging.
  std::function<void(const PursuitStep&)> on_step;
};

// Greedy residual pursuit: peels norming unitaries off P_fam^perp a until the
// squared residual norm drops below eps^2. Throws DomainError for eps <= 0 and
// CeilingError when a produced function exceeds opts.lyapunov.cell_ceiling.
PursuitResult pursue(const StepFn& a, const OrthoFamily& fam, const Rational& epsilon,
                     const PursuitOptions& opts = {});

// Saturating value returned by iteration_bound when the count exceeds uint64.
inline constexpr std::uint64_t kBoundSaturated = std::numeric_limits<std::uint64_t>::max();

// Safety factor applied to the minimal series index.
inline constexpr double kIterationBoundSafety = 1.1;

// Upper estimate on the number of pursuit iterations: ceil(1.1 * N) where N is
// the least index with sum_{k<=N} eps^4 / (|a0|_inf + sqrt(k-1) |a0|_2)^2 > |a0|_2^2.
// Returns 0 when eps^2 > |a0|_2^2. The first 2^20 terms are summed directly
// and the tail is estimated with the midpoint rule. Floating point; advisory only.
std::uint64_t iteration_bound(const Rational& norm2_sq_a0, const Rational& norm_inf_a0, const Rational& epsilon);

struct Check {
  std::string name;
  bool pass = false;
  std::string witness;  // empty on success
};

struct CertificateReport {
  std::vector<Check> checks;
  bool pass() const;
  const Check* first_failure() const;
};

// Re-derives every exact identity of a pursuit run from its inputs and output:
// energy identity per step, sum alpha^2 <= |a0|^2, the two sup-norm surrogates,
// pairwise orthogonality, exact decomposition, final residual size, and
// termination within iteration_bound.
CertificateReport certify_pursuit(const StepFn& a, const OrthoFamily& fam, const PursuitResult& result);

}  // namespace sau
