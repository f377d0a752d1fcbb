#include "sau/basis_engine.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "sau/errors.hpp"
#include "sau/parallel.hpp"

namespace sau {
namespace {

constexpr std::size_t kMaxWitnesses = 16;

}  // namespace

std::pair<unsigned, std::uint64_t> dyadic_position(std::uint64_t j) {
  const unsigned level = static_cast<unsigned>(std::bit_width(j + 1) - 1);
  return {level, j + 1 - (std::uint64_t{1} << level)};
}

StepFn dense_element(std::uint64_t j) {
  const auto [level, offset] = dyadic_position(j);
  const Rational width = Rational::pow2(-static_cast<long>(level));
  const Rational lo = Rational(offset) * width;
  return StepFn::indicator(lo, lo + width);
}

PairIndex pair_index(std::uint64_t m) {
  if (m == 0) throw DomainError("pair_index is 1-based");
  // smallest diagonal d with d(d+1)/2 >= m
  std::uint64_t d = 1;
  while (d * (d + 1) / 2 < m) d *= 2;
  std::uint64_t lo = d / 2;
  while (lo + 1 < d) {
    const std::uint64_t mid = lo + (d - lo) / 2;
    if (mid * (mid + 1) / 2 >= m) {
      d = mid;
    } else {
      lo = mid;
    }
  }
  const std::uint64_t j = m - (d - 1) * d / 2;
  return {j, d + 1 - j};
}

StageError::StageError(const CeilingError& cause, std::uint64_t stage)
    : CeilingError("stage " + std::to_string(stage) + ": " + cause.what(), cause.cells(), cause.ceiling()),
      stage_(stage) {}

void advance_stage(BasisState& state, const StageOptions& opts) {
  StageRecord rec;
  rec.m = state.stage_log.size() + 1;
  const PairIndex pair = pair_index(rec.m);
  rec.j = pair.j;
  rec.k = pair.k;

  const StepFn b = dense_element(pair.j - 1);
  const Rational eps = Rational::pow2(-static_cast<long>(pair.k));
  PursuitOptions popts;
  popts.lyapunov = opts.lyapunov;
  PursuitResult res;
  try {
    res = pursue(b, state.family, eps, popts);
  } catch (const CeilingError& e) {
    throw StageError(e, rec.m);
  }
  for (const PursuitStep& s : res.trace.iterations) state.family.append(s.unit.fn());
  rec.units_added = res.trace.iterations.size();
  rec.residual_norm2_sq = norm2_sq(res.residual);
  state.processed.insert(pair);
  state.stage_log.push_back(std::move(rec));
  if (opts.on_stage) opts.on_stage(state.stage_log.back(), state);
}

BasisState run_stages(std::uint64_t stages, const StageOptions& opts) {
  BasisState state;
  for (std::uint64_t m = 0; m < stages; ++m) advance_stage(state, opts);
  return state;
}

std::string to_string(PairStatus s) {
  switch (s) {
    case PairStatus::pass:
      return "pass";
    case PairStatus::fail:
      return "fail";
    case PairStatus::not_certified:
      return "not certified";
  }
  return "?";
}

PairIndex processed_extent(const BasisState& state) {
  PairIndex ext;
  for (const PairIndex& p : state.processed) {
    ext.j = std::max(ext.j, p.j);
    ext.k = std::max(ext.k, p.k);
  }
  return ext;
}

VerifyReport verify_basis(const BasisState& state, std::uint64_t j_max, std::uint64_t k_max, unsigned jobs) {
  VerifyReport report;
  const auto& members = state.family.members();
  const std::size_t r = members.size();
  report.first_member_is_one = r > 0 && members.front() == StepFn::constant(1);

  // Gram matrix, upper triangle, one row per work item.
  std::vector<std::vector<GramWitness>> row_fail(r);
  parallel_for(r, jobs, [&](std::size_t i) {
    for (std::size_t j = i; j < r; ++j) {
      Rational ip = inner(members[i], members[j]);
      if (ip != Rational(i == j ? 1 : 0)) row_fail[i].push_back({i, j, std::move(ip)});
    }
  });
  for (auto& row : row_fail) {
    for (auto& w : row) {
      if (report.gram_witnesses.size() < kMaxWitnesses) report.gram_witnesses.push_back(std::move(w));
    }
  }
  report.gram_pass = std::all_of(row_fail.begin(), row_fail.end(), [](const auto& v) { return v.empty(); });

  report.unitary_pass = true;
  for (std::size_t i = 0; i < r; ++i) {
    const StepFn& f = members[i];
    for (std::size_t c = 0; c < f.cells(); ++c) {
      const Rational& v = f.values()[c];
      if (v == Rational(1) || v == Rational(-1)) continue;
      report.unitary_pass = false;
      if (report.value_witnesses.size() < kMaxWitnesses) {
        report.value_witnesses.push_back({i, c, f.breakpoints()[c], f.breakpoints()[c + 1], v});
      }
    }
  }

  for (std::uint64_t j = 1; j <= j_max; ++j) {
    for (std::uint64_t k = 1; k <= k_max; ++k) {
      PairCertificate pc;
      pc.j = j;
      pc.k = k;
      pc.bound = Rational::pow2(-2 * static_cast<long>(k));
      report.pairs.push_back(std::move(pc));
    }
  }
  parallel_for(report.pairs.size(), jobs, [&](std::size_t idx) {
    PairCertificate& pc = report.pairs[idx];
    if (!state.processed.contains(PairIndex{pc.j, pc.k})) return;
    pc.distance_sq = norm2_sq(project_residual(dense_element(pc.j - 1), state.family).residual);
    pc.status = *pc.distance_sq < pc.bound ? PairStatus::pass : PairStatus::fail;
  });
  report.completeness_pass =
      std::none_of(report.pairs.begin(), report.pairs.end(), [](const auto& p) { return p.status == PairStatus::fail; });
  return report;
}

bool TraceVectorReport::pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.equal; });
}

TraceVectorReport trace_vector_certificate(const SAUnitaryFn& u, const std::vector<StepFn>& xs) {
  TraceVectorReport report;
  for (const StepFn& x : xs) {
    TraceVectorEntry e;
    e.lhs = trace(pointwise_mul(pointwise_mul(u.fn(), x), u.fn()));
    e.rhs = trace(x);
    e.equal = e.lhs == e.rhs;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace sau
