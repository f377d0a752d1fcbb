#include "sau/pursuit.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "sau/errors.hpp"

namespace sau {
namespace {

// Terms summed one by one before switching to the integral estimate.
constexpr std::uint64_t kDirectTerms = std::uint64_t{1} << 20;

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::uint64_t apply_safety(double n) {
  const double scaled = std::ceil(kIterationBoundSafety * n);
  if (!(scaled < 18446744073709549568.0)) return kBoundSaturated;  // largest double below 2^64
  return static_cast<std::uint64_t>(scaled);
}

void add_check(CertificateReport& report, std::string name, bool pass, const std::string& witness = {}) {
  report.checks.push_back({std::move(name), pass, pass ? std::string{} : witness});
}

}  // namespace

std::vector<SAUnitaryFn> PursuitResult::units() const {
  std::vector<SAUnitaryFn> out;
  out.reserve(trace.iterations.size());
  for (const PursuitStep& s : trace.iterations) out.push_back(s.unit);
  return out;
}

PursuitResult pursue(const StepFn& a, const OrthoFamily& fam, const Rational& epsilon, const PursuitOptions& opts) {
  if (epsilon.sign() <= 0) throw DomainError("epsilon must be positive, got " + epsilon.str());

  Projection proj = project_residual(a, fam);
  PursuitResult result;
  result.projection_coeffs = std::move(proj.coeffs);
  StepFn residual = std::move(proj.residual);

  PursuitTrace& trace = result.trace;
  trace.epsilon = epsilon;
  trace.norm2_sq_initial = norm2_sq(residual);
  trace.norm_inf_initial = norm_inf(residual);
  const Rational eps_sq = epsilon * epsilon;
  if (trace.norm2_sq_initial >= eps_sq) {
    trace.iteration_bound = iteration_bound(trace.norm2_sq_initial, trace.norm_inf_initial, epsilon);
  }

  OrthoFamily extended = fam;
  Rational current = trace.norm2_sq_initial;
  while (current >= eps_sq) {
    NormingUnitary nu = norming_unitary(residual, extended, opts.lyapunov);
    residual = axpy(residual, -nu.alpha, nu.u.fn());
    if (residual.cells() > opts.lyapunov.cell_ceiling) {
      throw CeilingError("residual has " + std::to_string(residual.cells()) + " cells after iteration " +
                             std::to_string(trace.iterations.size() + 1),
                         residual.cells(), opts.lyapunov.cell_ceiling);
    }
    extended.append(nu.u.fn());

    PursuitStep step;
    step.k = trace.iterations.size() + 1;
    step.alpha = std::move(nu.alpha);
    step.unit = std::move(nu.u);
    step.norm2_sq_after = norm2_sq(residual);
    step.norm_inf_after = norm_inf(residual);
    if (step.norm2_sq_after != current - step.alpha * step.alpha) {
      throw CertificateError("energy identity failed at iteration " + std::to_string(step.k));
    }
    current = step.norm2_sq_after;
    trace.iterations.push_back(std::move(step));
    if (opts.on_step) opts.on_step(trace.iterations.back());
  }
  result.residual = std::move(residual);
  return result;
}

std::uint64_t iteration_bound(const Rational& norm2_sq_a0, const Rational& norm_inf_a0, const Rational& epsilon) {
  if (norm2_sq_a0.sign() <= 0 || norm_inf_a0.sign() <= 0 || epsilon.sign() <= 0) {
    throw DomainError("iteration_bound needs positive arguments");
  }
  if (epsilon * epsilon > norm2_sq_a0) return 0;

  const double target = norm2_sq_a0.to_double();
  const double a_inf = norm_inf_a0.to_double();
  const double a_two = std::sqrt(target);
  const double eps = epsilon.to_double();
  const double eps4 = eps * eps * eps * eps;

  CompensatedSum sum;
  for (std::uint64_t k = 1; k <= kDirectTerms; ++k) {
    const double d = a_inf + std::sqrt(static_cast<double>(k - 1)) * a_two;
    sum.add(eps4 / (d * d));
    if (sum.value() > target) return apply_safety(static_cast<double>(k));
  }

  // Tail by the midpoint rule: sum_{k=K+1}^{N} f(k) ~ int_{K+1/2}^{N+1/2} f(x) dx, whose
  // antiderivative is (2 eps^4 / B^2) * phi(A + B sqrt(x-1)), phi(z) = ln z + A/z.
  const double remaining = target - sum.value();
  const double scale = 2.0 * eps4 / (a_two * a_two);
  const auto phi = [&](double z) { return std::log(z) + a_inf / z; };
  const double z0 = a_inf + a_two * std::sqrt(static_cast<double>(kDirectTerms) - 0.5);
  const double y = phi(z0) + remaining / scale;

  // Solve ln z + A/z = y for z > A via u = ln z, u = y - A e^{-u}.
  double u = y;
  for (int it = 0; it < 200; ++it) {
    const double next = y - a_inf * std::exp(-u);
    const bool done = std::abs(next - u) <= 1e-15 * std::abs(u);
    u = next;
    if (done) break;
  }
  // x = N + 1/2 = s^2 + 1 with s = (z - A) / B.
  const double log_s2 = 2.0 * (u + std::log1p(-a_inf * std::exp(-u)) - std::log(a_two));
  if (!(log_s2 < 44.0)) return kBoundSaturated;
  const double s = (std::exp(u) - a_inf) / a_two;
  return apply_safety(std::ceil(s * s + 0.5));
}

bool CertificateReport::pass() const { return first_failure() == nullptr; }

const Check* CertificateReport::first_failure() const {
  for (const Check& c : checks) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

CertificateReport certify_pursuit(const StepFn& a, const OrthoFamily& fam, const PursuitResult& result) {
  CertificateReport report;
  const PursuitTrace& trace = result.trace;
  const auto& steps = trace.iterations;

  const Projection proj = project_residual(a, fam);
  add_check(report, "projection coefficients", proj.coeffs == result.projection_coeffs,
            "recomputed <a, e_i> differ from recorded ones");
  add_check(report, "initial norms",
            norm2_sq(proj.residual) == trace.norm2_sq_initial && norm_inf(proj.residual) == trace.norm_inf_initial,
            "recorded |a0| values do not match P^perp a");

  // Replay a_k = a_{k-1} - alpha_k u_k.
  StepFn current = proj.residual;
  Rational prev_sq = trace.norm2_sq_initial;
  Rational prev_inf = trace.norm_inf_initial;
  Rational sum_sq;
  Rational sum_abs;
  bool energy = true, norming = true, replay = true, bessel = true, sup_bound = true, cauchy = true, decreasing = true;
  std::ostringstream w_energy, w_norming, w_replay, w_bessel, w_sup, w_cauchy, w_dec;
  for (const PursuitStep& s : steps) {
    const Rational kq(static_cast<long>(s.k));
    if (s.alpha.is_zero() || s.alpha * prev_inf != prev_sq) {
      if (norming) w_norming << "k=" << s.k << ": alpha=" << s.alpha << ", |a|_inf=" << prev_inf;
      norming = false;
    }
    current = axpy(current, -s.alpha, s.unit.fn());
    if (norm2_sq(current) != s.norm2_sq_after || norm_inf(current) != s.norm_inf_after) {
      if (replay) w_replay << "k=" << s.k;
      replay = false;
    }
    if (s.norm2_sq_after != prev_sq - s.alpha * s.alpha) {
      if (energy) w_energy << "k=" << s.k << ": " << s.norm2_sq_after << " != " << prev_sq << " - " << s.alpha << "^2";
      energy = false;
    }
    if (!(s.norm2_sq_after < prev_sq)) {
      if (decreasing) w_dec << "k=" << s.k;
      decreasing = false;
    }
    sum_sq += s.alpha * s.alpha;
    sum_abs += abs(s.alpha);
    if (sum_sq > trace.norm2_sq_initial) {
      if (bessel) w_bessel << "k=" << s.k << ": sum alpha^2 = " << sum_sq;
      bessel = false;
    }
    if (s.norm_inf_after > trace.norm_inf_initial + sum_abs) {
      if (sup_bound) w_sup << "k=" << s.k << ": |a_k|_inf = " << s.norm_inf_after;
      sup_bound = false;
    }
    if (sum_abs * sum_abs > kq * sum_sq) {
      if (cauchy) w_cauchy << "k=" << s.k;
      cauchy = false;
    }
    prev_sq = s.norm2_sq_after;
    prev_inf = s.norm_inf_after;
  }
  add_check(report, "norming identity", norming, w_norming.str());
  add_check(report, "replayed residual norms", replay && current == result.residual, w_replay.str() + " replay mismatch");
  add_check(report, "energy identity", energy, w_energy.str());
  add_check(report, "strict decrease", decreasing, w_dec.str());
  add_check(report, "sum alpha^2 <= |a0|_2^2", bessel, w_bessel.str());
  add_check(report, "|a_k|_inf <= |a0|_inf + sum|alpha|", sup_bound, w_sup.str());
  add_check(report, "(sum|alpha|)^2 <= k sum alpha^2", cauchy, w_cauchy.str());

  // Orthogonality ledger.
  bool ortho = true;
  std::ostringstream w_ortho;
  for (std::size_t i = 0; i < steps.size() && ortho; ++i) {
    const StepFn& ui = steps[i].unit.fn();
    for (std::size_t j = i; j < steps.size() && ortho; ++j) {
      const Rational ip = inner(ui, steps[j].unit.fn());
      if (ip != Rational(i == j ? 1 : 0)) {
        w_ortho << "<u" << i + 1 << ", u" << j + 1 << "> = " << ip;
        ortho = false;
      }
    }
    for (std::size_t e = 0; e < fam.size() && ortho; ++e) {
      if (!inner(ui, fam[e]).is_zero()) {
        w_ortho << "<u" << i + 1 << ", e" << e << "> != 0";
        ortho = false;
      }
    }
    if (ortho && !inner(result.residual, ui).is_zero()) {
      w_ortho << "<residual, u" << i + 1 << "> != 0";
      ortho = false;
    }
  }
  for (std::size_t e = 0; e < fam.size() && ortho; ++e) {
    if (!inner(result.residual, fam[e]).is_zero()) {
      w_ortho << "<residual, e" << e << "> != 0";
      ortho = false;
    }
  }
  add_check(report, "orthogonality ledger", ortho, w_ortho.str());

  // a - P_fam a - sum alpha_k u_k - residual = 0.
  std::vector<Term> terms{{Rational(1), &a}, {Rational(-1), &result.residual}};
  for (std::size_t e = 0; e < fam.size(); ++e) terms.push_back({-result.projection_coeffs[e], &fam[e]});
  for (const PursuitStep& s : steps) terms.push_back({-s.alpha, &s.unit.fn()});
  const StepFn defect = lin_comb(terms);
  add_check(report, "exact decomposition", defect.is_zero(),
            "defect has " + std::to_string(defect.cells()) + " cells, |defect|_inf = " + norm_inf(defect).str());

  const Rational final_sq = norm2_sq(result.residual);
  add_check(report, "|residual|_2 < epsilon", final_sq < trace.epsilon * trace.epsilon,
            "|residual|_2^2 = " + final_sq.str());
  std::uint64_t bound = 0;
  if (trace.norm2_sq_initial.sign() > 0) {
    bound = iteration_bound(trace.norm2_sq_initial, trace.norm_inf_initial, trace.epsilon);
  }
  add_check(report, "terminated within iteration_bound", steps.size() <= bound,
            std::to_string(steps.size()) + " > " + std::to_string(bound));
  return report;
}

}  // namespace sau
