#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sau/rational.hpp"
#include "sau/step_function.hpp"

namespace sau {

// Ordered, exactly orthonormal list of step functions whose first member is
// the constant 1. Spans the subspaces F and E_m of the construction.
class OrthoFamily {
 public:
  // The family {1}.
  OrthoFamily();

  // Checks the full Gram matrix against the identity. Throws InputError with
  // the offending pair on failure.
  static OrthoFamily from_members(std::vector<StepFn> members);

  // Wraps members without any check. Only for loading artifacts that are
  // about to be verified; every other caller should use from_members.
  static OrthoFamily assume_orthonormal(std::vector<StepFn> members);

  // Appends e after checking <e, e> = 1 and <e, m> = 0 for every current member.
  void append(StepFn e);

  const std::vector<StepFn>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const StepFn& operator[](std::size_t i) const { return members_[i]; }

  // Largest cell count among members.
  std::size_t max_cells() const;

  friend bool operator==(const OrthoFamily&, const OrthoFamily&) = default;

 private:
  std::vector<StepFn> members_;
};

struct Projection {
  std::vector<Rational> coeffs;  // <a, e_i>
  StepFn residual;               // a - sum_i coeffs[i] e_i
};

// Orthogonal projection onto the complement of span(fam).
Projection project_residual(const StepFn& a, const OrthoFamily& fam);

// sum_i coeffs[i] * members[i]
StepFn expand(std::span<const Rational> coeffs, std::span<const StepFn> members);

}  // namespace sau
