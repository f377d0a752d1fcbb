#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

#include "sau/ortho_family.hpp"
#include "sau/rational.hpp"
#include "sau/step_function.hpp"

namespace sau {

// How a positive contraction q is turned into a projection p with the same
// pairings. Both rules put the mass of each split cell on its left part.
enum class SplitRule {
  // Every cell with 0 < q < 1 is split at the fraction q. Matches tau(p g) = tau(q g)
  // for every g constant on the common grid, but doubles the cell count per call.
  cellwise,
  // Starts from the same fractions and pivots them onto a vertex of
  // {t in [0,1]^cells : sum_j len_j g(j) t_j fixed for every constraint g}.
  // At most (number of constraints) cells stay fractional, so partitions grow
  // additively. Matches exactly the requested constraints.
  vertex,
};

std::string_view to_string(SplitRule rule);
SplitRule split_rule_from_string(std::string_view name);

struct LyapunovOptions {
  SplitRule rule = SplitRule::vertex;
  std::size_t cell_ceiling = std::numeric_limits<std::size_t>::max();
};

// Projection p with tau(p g) = tau(q g) for every g in constraints.
// Requires 0 <= q <= 1 everywhere (DomainError otherwise).
ProjectionFn extract_projection(const StepFn& q, std::span<const StepFn> constraints,
                                const LyapunovOptions& opts = {});

struct NormingUnitary {
  SAUnitaryFn u;
  Rational alpha;  // <a, u> = |a|_2^2 / |a|_inf
};

// Self-adjoint unitary u orthogonal to fam with tau(a u) = |a|_2^2 / |a|_inf.
// Requires a != 0 (DomainError) and a orthogonal to every member (InputError).
NormingUnitary norming_unitary(const StepFn& a, const OrthoFamily& fam, const LyapunovOptions& opts = {});

}  // namespace sau
