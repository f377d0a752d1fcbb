#include <gtest/gtest.h>

#include <random>

#include "sau/errors.hpp"
#include "sau/lyapunov.hpp"
#include "sau/matrix_bundle.hpp"
#include "sau/pursuit.hpp"
#include "test_support.hpp"

using namespace sau;
using namespace sau::bundle;
using sau::testing::q;
using sau::testing::step;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Matrix sigma_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix one_by_one(double v) { return Matrix::Constant(1, 1, v); }

MatStepFn embed(const StepFn& f) { return MatStepFn::tensor(f, one_by_one(1.0)); }

// |f - g|_2^2 for an abelian f and a 1x1 bundle g. Split points of g come from
// doubles, so g may differ from f by O(1) on slivers of width ~1e-17; the
// squared distance stays at that scale while the unsquared one is ~1e-8.
double dist_sq(const StepFn& f, const MatStepFn& g) { return nc_norm2_sq(axpy(embed(f), -1.0, g)); }

Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
  }
  return (m + m.adjoint()) / 2.0;
}

// Random Hermitian bundle scaled to |a|_inf = 1.
MatStepFn random_bundle(std::mt19937_64& rng, std::size_t n, std::size_t cells) {
  std::vector<Rational> bp{q(0)};
  for (std::size_t i = 1; i < cells; ++i) bp.push_back(Rational(static_cast<long>(i), static_cast<long>(cells)));
  bp.push_back(q(1));
  std::vector<Matrix> mats;
  for (std::size_t i = 0; i < cells; ++i) mats.push_back(random_hermitian(rng, static_cast<Eigen::Index>(n)));
  const MatStepFn a = MatStepFn::from_cells(bp, mats);
  return scale(1.0 / nc_norm_inf(a), a);
}

}  // namespace

TEST(MatStepFn, IdentityTrace) {
  for (std::size_t n = 1; n <= 8; ++n) EXPECT_DOUBLE_EQ(nc_trace(MatStepFn::identity(n)), 1.0);
  EXPECT_THROW(MatStepFn::identity(9), DomainError);
  EXPECT_THROW(MatStepFn(0), DomainError);
}

TEST(MatStepFn, DiagonalSignature) {
  const MatStepFn x = MatStepFn::constant(diag2(1, -1));
  EXPECT_DOUBLE_EQ(nc_trace(x), 0.0);
  EXPECT_DOUBLE_EQ(nc_inner(x, x), 1.0);
  EXPECT_DOUBLE_EQ(nc_norm_inf(x), 1.0);
  EXPECT_DOUBLE_EQ(nc_norm2_sq(x), 1.0);
}

TEST(MatStepFn, StructuralChecks) {
  EXPECT_THROW(MatStepFn::from_cells({q(0), q(1, 2)}, {one_by_one(1)}), StructuralError);
  EXPECT_THROW(MatStepFn::from_cells({q(0), q(1, 2), q(1)}, {one_by_one(1), diag2(1, 1)}), StructuralError);
  EXPECT_THROW(axpy(MatStepFn::identity(1), 1.0, MatStepFn::identity(2)), StructuralError);
  const MatStepFn merged = MatStepFn::from_cells({q(0), q(1, 3), q(1)}, {diag2(1, 2), diag2(1, 2)});
  EXPECT_EQ(merged.cell_count(), 1u);
}

TEST(MatStepFn, ScalarReductionAgreesWithAbelian) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const StepFn f = sau::testing::random_step(rng, 1 + trial % 6);
    const StepFn g = sau::testing::random_step(rng, 1 + trial % 4);
    EXPECT_NEAR(nc_trace(embed(f)), trace(f).to_double(), 1e-12);
    EXPECT_NEAR(nc_inner(embed(f), embed(g)), inner(f, g).to_double(), 1e-12);
    EXPECT_NEAR(nc_norm_inf(embed(f)), norm_inf(f).to_double(), 1e-12);
    EXPECT_NEAR(nc_norm2_sq(embed(f)), norm2_sq(f).to_double(), 1e-12);
  }
}

TEST(NcExtract, HalfIdentity) {
  const MatStepFn qf = MatStepFn::constant(Matrix::Identity(2, 2) * 0.5);
  const std::vector<MatStepFn> cons{MatStepFn::identity(2)};
  const MatStepFn p = nc_extract_projection(qf, cons);
  ASSERT_EQ(p.cell_count(), 2u);
  EXPECT_EQ(p.breakpoints(), (std::vector<Rational>{q(0), q(1, 2), q(1)}));
  EXPECT_LE((p.cells()[0] - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE(p.cells()[1].norm(), 1e-12);
  EXPECT_NEAR(nc_trace(p), 0.5, 1e-12);
}

TEST(NcExtract, ProjectionIsFixedPoint) {
  Matrix proj = Matrix::Zero(2, 2);
  proj(0, 0) = 0.5;
  proj(0, 1) = 0.5;
  proj(1, 0) = 0.5;
  proj(1, 1) = 0.5;
  const MatStepFn qf = MatStepFn::from_cells({q(0), q(1, 3), q(1)}, {proj, diag2(0, 1)});
  const std::vector<MatStepFn> cons{MatStepFn::identity(2)};
  const MatStepFn p = nc_extract_projection(qf, cons);
  EXPECT_LE(projection_defect(p), 1e-10);
  EXPECT_EQ(p.breakpoints(), qf.breakpoints());
  for (std::size_t c = 0; c < p.cell_count(); ++c) EXPECT_LE((p.cells()[c] - qf.cells()[c]).norm(), 1e-10);
}

TEST(NcExtract, RejectsSpectrumOutsideUnitInterval) {
  const std::vector<MatStepFn> cons{MatStepFn::identity(2)};
  EXPECT_THROW(nc_extract_projection(MatStepFn::constant(diag2(1.5, 0)), cons), DomainError);
  EXPECT_THROW(nc_extract_projection(MatStepFn::constant(sigma_x()), cons), DomainError);
}

TEST(NcExtract, ScalarCaseMatchesCellwiseAbelian) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long> num(0, 10);
  const LyapunovOptions cellwise{SplitRule::cellwise};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rational> bp{q(0), q(1, 3), q(1, 2), q(1)};
    const StepFn qf = canonicalize(bp, {Rational(num(rng), 10), Rational(num(rng), 10), Rational(num(rng), 10)});
    const StepFn g = sau::testing::random_step(rng, 3);
    const std::vector<StepFn> cons{StepFn::constant(1), g};
    const std::vector<MatStepFn> ncons{embed(cons[0]), embed(cons[1])};
    const ProjectionFn pa = extract_projection(qf, cons, cellwise);
    const MatStepFn pb = nc_extract_projection(embed(qf), ncons);
    EXPECT_LE(dist_sq(pa.fn(), pb), 1e-12);
    EXPECT_NEAR(nc_inner(embed(pa.fn()), embed(pa.fn())), nc_inner(pb, pb), 1e-12);
  }
}

TEST(NcNorming, RademacherScalar) {
  const std::vector<MatStepFn> fam{MatStepFn::identity(1)};
  const NcNormingUnitary nu = nc_norming_unitary(embed(sau::testing::rademacher1()), fam);
  EXPECT_NEAR(nu.alpha, 1.0, 1e-12);
  EXPECT_LE(dist_sq(sau::testing::rademacher1(), nu.u), 1e-12);
}

TEST(NcNorming, DiagonalSign) {
  const MatStepFn a = MatStepFn::constant(diag2(1, -1));
  const std::vector<MatStepFn> fam{MatStepFn::identity(2)};
  const NcNormingUnitary nu = nc_norming_unitary(a, fam);
  EXPECT_NEAR(nu.alpha, nc_inner(a, a), 1e-12);
  EXPECT_NEAR(nc_inner(a, nu.u), 1.0, 1e-12);
  EXPECT_LE(nc_norm_inf(axpy(nu.u, -1.0, a)), 1e-12);
}

TEST(NcNorming, PauliX) {
  const MatStepFn a = MatStepFn::constant(sigma_x());
  const std::vector<MatStepFn> fam{MatStepFn::identity(2)};
  const NcNormingUnitary nu = nc_norming_unitary(a, fam);
  EXPECT_NEAR(nu.alpha, 1.0, 1e-12);
  EXPECT_NEAR(nc_inner(a, nu.u), 1.0, 1e-12);
  EXPECT_LE(nc_norm_inf(axpy(nu.u, -1.0, a)), 1e-10);
  EXPECT_LE(involution_defect(nu.u), 1e-10);
}

TEST(NcNorming, Preconditions) {
  const std::vector<MatStepFn> fam{MatStepFn::identity(2)};
  EXPECT_THROW(nc_norming_unitary(MatStepFn(2), fam), DomainError);
  EXPECT_THROW(nc_norming_unitary(MatStepFn::constant(diag2(1, 0)), fam), InputError);
}

TEST(NcPursue, DiagonalSignOneStep) {
  const MatStepFn a = MatStepFn::constant(diag2(1, -1));
  const std::vector<MatStepFn> fam{MatStepFn::identity(2)};
  const NcPursuitResult res = nc_pursue(a, fam, q(1, 2));
  ASSERT_EQ(res.trace.iterations.size(), 1u);
  EXPECT_NEAR(res.trace.iterations[0].alpha, 1.0, 1e-12);
  EXPECT_LE(nc_norm2_sq(res.residual), 1e-20);
  EXPECT_TRUE(nc_certify_pursuit(a, fam, res).pass());
}

TEST(NcPursue, SmallTargetNeedsNoSteps) {
  const MatStepFn a = MatStepFn::constant(diag2(0.1, -0.1));
  const std::vector<MatStepFn> fam{MatStepFn::identity(2)};
  const NcPursuitResult res = nc_pursue(a, fam, q(1, 2));
  EXPECT_TRUE(res.trace.iterations.empty());
  EXPECT_THROW(nc_pursue(a, fam, q(0)), DomainError);
}

TEST(NcPursue, ScalarCaseMatchesCellwiseAbelian) {
  std::mt19937_64 rng(10);
  PursuitOptions cellwise;
  cellwise.lyapunov.rule = SplitRule::cellwise;
  const std::vector<MatStepFn> nfam{MatStepFn::identity(1)};
  for (int trial = 0; trial < 15; ++trial) {
    const StepFn a = sau::testing::random_step(rng, 2 + trial % 3, 4, 4);
    const PursuitResult ra = pursue(a, OrthoFamily(), q(1, 2), cellwise);
    const NcPursuitResult rb = nc_pursue(embed(a), nfam, q(1, 2));
    ASSERT_EQ(ra.trace.iterations.size(), rb.trace.iterations.size());
    for (std::size_t k = 0; k < ra.trace.iterations.size(); ++k) {
      EXPECT_NEAR(ra.trace.iterations[k].alpha.to_double(), rb.trace.iterations[k].alpha, 1e-12);
      EXPECT_LE(dist_sq(ra.trace.iterations[k].unit.fn(), rb.trace.iterations[k].unit), 1e-12);
    }
  }
}

TEST(NcPursue, RandomHermitianTargetsCertified) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 2; n <= 4; ++n) {
    const std::vector<MatStepFn> fam{MatStepFn::identity(n)};
    for (int trial = 0; trial < 5; ++trial) {
      const MatStepFn a = random_bundle(rng, n, 1 + trial % 3);
      const NcPursuitResult res = nc_pursue(a, fam, q(1, 2));
      const NcCertificate cert = nc_certify_pursuit(a, fam, res);
      for (const NcCheck& c : cert.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.worst;
    }
  }
}

TEST(NcTraceVector, UnitariesPreserveTrace) {
  std::mt19937_64 rng(14);
  const MatStepFn a = random_bundle(rng, 3, 2);
  const std::vector<MatStepFn> fam{MatStepFn::identity(3)};
  const NcPursuitResult res = nc_pursue(a, fam, q(1, 2));
  std::vector<MatStepFn> xs;
  for (int i = 0; i < 10; ++i) xs.push_back(random_bundle(rng, 3, 1 + i % 4));
  for (const NcPursuitStep& s : res.trace.iterations) EXPECT_LE(nc_trace_vector_defect(s.unit, xs), 1e-8);
}

TEST(HermitianUnits, OrthogonalBasisOfHermitianMatrices) {
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<MatStepFn> units;
    for (std::size_t i = 0; i < n * n; ++i) {
      const Matrix h = hermitian_unit(n, i);
      EXPECT_EQ((h - h.adjoint()).norm(), 0.0);
      units.push_back(MatStepFn::constant(h));
    }
    for (std::size_t i = 0; i < units.size(); ++i) {
      EXPECT_GT(nc_norm2_sq(units[i]), 0.0);
      for (std::size_t j = i + 1; j < units.size(); ++j) EXPECT_EQ(nc_inner(units[i], units[j]), 0.0);
    }
  }
  EXPECT_THROW(hermitian_unit(2, 4), DomainError);
}

TEST(NcStages, ScalarRunMatchesAbelianRun) {
  const NcBasisState nc = nc_run_stages(1, 3);
  StageOptions cellwise;
  cellwise.lyapunov.rule = SplitRule::cellwise;
  const BasisState ab = run_stages(3, cellwise);
  ASSERT_EQ(nc.family.size(), ab.family.size());
  for (std::size_t i = 0; i < nc.family.size(); ++i) EXPECT_LE(dist_sq(ab.family[i], nc.family[i]), 1e-12);
}

TEST(NcStages, TwoByTwoVerifies) {
  const NcBasisState s = nc_run_stages(2, 15);
  EXPECT_GT(s.family.size(), 1u);
  const NcVerifyReport r = nc_verify_basis(s, 5, 5, {}, 2);
  EXPECT_TRUE(r.pass());
  const NcVerifyReport r1 = nc_verify_basis(s, 5, 5, {}, 1);
  for (std::size_t i = 0; i < r.pairs.size(); ++i) EXPECT_EQ(r.pairs[i].distance_sq, r1.pairs[i].distance_sq);
}

TEST(NcStages, TamperedMemberFailsWithWitness) {
  NcBasisState s = nc_run_stages(2, 10);
  std::vector<Matrix> cells = s.family[1].cells();
  cells[0](0, 0) = 2.0;
  s.family[1] = MatStepFn::from_cells(s.family[1].breakpoints(), cells);
  const NcVerifyReport r = nc_verify_basis(s, 3, 3);
  EXPECT_FALSE(r.pass());
  ASSERT_FALSE(r.unitary_witnesses.empty());
  EXPECT_EQ(r.unitary_witnesses[0].member, 1u);
  EXPECT_EQ(r.unitary_witnesses[0].cell, 0u);
}
