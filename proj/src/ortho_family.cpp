#include "sau/ortho_family.hpp"

#include <algorithm>
#include <string>

#include "sau/errors.hpp"

namespace sau {

OrthoFamily::OrthoFamily() : members_{StepFn::constant(1)} {}

OrthoFamily OrthoFamily::from_members(std::vector<StepFn> members) {
  if (members.empty() || members.front() != StepFn::constant(1)) {
    throw InputError("member 0 of an orthonormal family must be the constant 1");
  }
  const auto g = gram(members);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Rational expected(i == j ? 1 : 0);
      if (g[i][j] != expected) {
        throw InputError("family is not orthonormal: <e" + std::to_string(i) + ", e" + std::to_string(j) +
                         "> = " + g[i][j].str());
      }
    }
  }
  OrthoFamily fam;
  fam.members_ = std::move(members);
  return fam;
}

OrthoFamily OrthoFamily::assume_orthonormal(std::vector<StepFn> members) {
  OrthoFamily fam;
  fam.members_ = std::move(members);
  return fam;
}

void OrthoFamily::append(StepFn e) {
  const Rational n = norm2_sq(e);
  if (n != Rational(1)) throw InputError("appended member has squared norm " + n.str());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const Rational ip = inner(e, members_[i]);
    if (!ip.is_zero()) {
      throw InputError("appended member not orthogonal to e" + std::to_string(i) + ": inner = " + ip.str());
    }
  }
  members_.push_back(std::move(e));
}

std::size_t OrthoFamily::max_cells() const {
  std::size_t m = 0;
  for (const StepFn& e : members_) m = std::max(m, e.cells());
  return m;
}

StepFn expand(std::span<const Rational> coeffs, std::span<const StepFn> members) {
  std::vector<Term> terms;
  terms.reserve(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!coeffs[i].is_zero()) terms.push_back({coeffs[i], &members[i]});
  }
  return lin_comb(terms);
}

Projection project_residual(const StepFn& a, const OrthoFamily& fam) {
  Projection p;
  p.coeffs.reserve(fam.size());
  std::vector<Term> terms{{Rational(1), &a}};
  for (const StepFn& e : fam.members()) {
    p.coeffs.push_back(inner(a, e));
    if (!p.coeffs.back().is_zero()) terms.push_back({-p.coeffs.back(), &e});
  }
  p.residual = lin_comb(terms);
  return p;
}

}  // namespace sau
