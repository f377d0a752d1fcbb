#include "sau/serialize.hpp"

#include "sau/errors.hpp"

namespace sau::io {
namespace {

template <typename F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  } catch (const StructuralError& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

Json processed_to_json(const std::set<PairIndex>& processed) {
  Json arr = Json::array();
  for (const PairIndex& p : processed) arr.push_back(Json::array({p.j, p.k}));
  return arr;
}

std::set<PairIndex> processed_from_json(const Json& j) {
  std::set<PairIndex> out;
  for (const Json& p : j) {
    if (!p.is_array() || p.size() != 2) throw ParseError("processed entries must be [j, k] pairs");
    out.insert(PairIndex{p.at(0).get<std::uint64_t>(), p.at(1).get<std::uint64_t>()});
  }
  return out;
}

void require_model(const Json& j, std::string_view model) {
  if (model_of(j) != model) throw ParseError("expected model \"" + std::string(model) + "\", got \"" + model_of(j) + "\"");
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

Json to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const Json& j) {
  if (!j.is_string()) throw ParseError("rational must be a \"p/q\" string, got " + j.dump());
  return Rational::parse(j.get<std::string>());
}

Json to_json(const StepFn& f) {
  Json bp = Json::array();
  for (const Rational& r : f.breakpoints()) bp.push_back(to_json(r));
  Json vals = Json::array();
  for (const Rational& r : f.values()) vals.push_back(to_json(r));
  return Json{{"breakpoints", std::move(bp)}, {"values", std::move(vals)}};
}

StepFn step_from_json(const Json& j) {
  return guarded("step function", [&] {
    std::vector<Rational> bp;
    for (const Json& v : j.at("breakpoints")) bp.push_back(rational_from_json(v));
    std::vector<Rational> vals;
    for (const Json& v : j.at("values")) vals.push_back(rational_from_json(v));
    return canonicalize(std::move(bp), std::move(vals));
  });
}

Json to_json(const BasisState& s) {
  Json fam = Json::array();
  for (const StepFn& f : s.family.members()) fam.push_back(to_json(f));
  Json log = Json::array();
  for (const StageRecord& r : s.stage_log) {
    log.push_back(Json{{"m", r.m},
                       {"j", r.j},
                       {"k", r.k},
                       {"units_added", r.units_added},
                       {"residual_norm2_sq", to_json(r.residual_norm2_sq)}});
  }
  return Json{{"model", "abelian"},
              {"family", std::move(fam)},
              {"stage_log", std::move(log)},
              {"processed", processed_to_json(s.processed)}};
}

BasisState basis_from_json(const Json& j) {
  return guarded("basis file", [&] {
    require_model(j, "abelian");
    std::vector<StepFn> members;
    for (const Json& f : j.at("family")) members.push_back(step_from_json(f));
    BasisState s;
    s.family = OrthoFamily::assume_orthonormal(std::move(members));
    for (const Json& r : j.at("stage_log")) {
      s.stage_log.push_back(StageRecord{r.at("m").get<std::uint64_t>(), r.at("j").get<std::uint64_t>(),
                                        r.at("k").get<std::uint64_t>(), r.at("units_added").get<std::size_t>(),
                                        rational_from_json(r.at("residual_norm2_sq"))});
    }
    s.processed = processed_from_json(j.at("processed"));
    return s;
  });
}

Json to_json(const PursuitResult& r) {
  const PursuitTrace& t = r.trace;
  Json coeffs = Json::array();
  for (const Rational& c : r.projection_coeffs) coeffs.push_back(to_json(c));
  Json steps = Json::array();
  for (const PursuitStep& s : t.iterations) {
    steps.push_back(Json{{"k", s.k},
                         {"alpha", to_json(s.alpha)},
                         {"norm2_sq_after", to_json(s.norm2_sq_after)},
                         {"norm_inf_after", to_json(s.norm_inf_after)},
                         {"unit", to_json(s.unit.fn())}});
  }
  return Json{{"model", "abelian"},
              {"epsilon", to_json(t.epsilon)},
              {"norm2_sq_initial", to_json(t.norm2_sq_initial)},
              {"norm_inf_initial", to_json(t.norm_inf_initial)},
              {"iteration_bound", t.iteration_bound},
              {"iteration_bound_saturated", t.iteration_bound == kBoundSaturated},
              {"projection_coeffs", std::move(coeffs)},
              {"iterations", std::move(steps)},
              {"residual", to_json(r.residual)}};
}

Json to_json(const VerifyReport& r) {
  Json gram = Json::array();
  for (const GramWitness& w : r.gram_witnesses) {
    gram.push_back(Json{{"row", w.row}, {"col", w.col}, {"value", to_json(w.value)}});
  }
  Json values = Json::array();
  for (const ValueWitness& w : r.value_witnesses) {
    values.push_back(Json{{"member", w.member},
                          {"cell", w.cell},
                          {"lo", to_json(w.lo)},
                          {"hi", to_json(w.hi)},
                          {"value", to_json(w.value)}});
  }
  Json pairs = Json::array();
  for (const PairCertificate& p : r.pairs) {
    Json e{{"j", p.j}, {"k", p.k}, {"status", to_string(p.status)}, {"bound", to_json(p.bound)}};
    if (p.distance_sq) e["distance_sq"] = to_json(*p.distance_sq);
    pairs.push_back(std::move(e));
  }
  return Json{{"model", "abelian"},
              {"pass", r.pass()},
              {"first_member_is_one", r.first_member_is_one},
              {"gram_pass", r.gram_pass},
              {"gram_witnesses", std::move(gram)},
              {"unitary_pass", r.unitary_pass},
              {"value_witnesses", std::move(values)},
              {"completeness_pass", r.completeness_pass},
              {"pairs", std::move(pairs)}};
}

Json to_json(const bundle::Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

bundle::Matrix matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    const auto n = static_cast<Eigen::Index>(j.size());
    if (n == 0) throw ParseError("empty matrix");
    bundle::Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Json& row = j.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != n) throw ParseError("matrix is not square");
      for (Eigen::Index k = 0; k < n; ++k) {
        const Json& e = row.at(static_cast<std::size_t>(k));
        if (!e.is_array() || e.size() != 2) throw ParseError("matrix entries must be [re, im]");
        m(i, k) = bundle::Complex(e.at(0).get<double>(), e.at(1).get<double>());
      }
    }
    return m;
  });
}

Json to_json(const bundle::MatStepFn& f) {
  Json bp = Json::array();
  for (const Rational& r : f.breakpoints()) bp.push_back(to_json(r));
  Json cells = Json::array();
  for (const bundle::Matrix& m : f.cells()) cells.push_back(to_json(m));
  return Json{{"n", f.n()}, {"breakpoints", std::move(bp)}, {"cells", std::move(cells)}};
}

bundle::MatStepFn mat_step_from_json(const Json& j) {
  return guarded("matrix step function", [&] {
    std::vector<Rational> bp;
    for (const Json& v : j.at("breakpoints")) bp.push_back(rational_from_json(v));
    std::vector<bundle::Matrix> cells;
    for (const Json& c : j.at("cells")) cells.push_back(matrix_from_json(c));
    bundle::MatStepFn f = bundle::MatStepFn::from_cells(std::move(bp), std::move(cells));
    if (f.n() != j.at("n").get<std::size_t>()) throw ParseError("cell size disagrees with n");
    return f;
  });
}

Json to_json(const bundle::NcBasisState& s) {
  Json fam = Json::array();
  for (const bundle::MatStepFn& f : s.family) fam.push_back(to_json(f));
  Json log = Json::array();
  for (const bundle::NcStageRecord& r : s.stage_log) {
    log.push_back(Json{{"m", r.m},
                       {"j", r.j},
                       {"k", r.k},
                       {"units_added", r.units_added},
                       {"residual_norm2_sq", r.residual_norm2_sq}});
  }
  return Json{{"model", "matrix"},
              {"n", s.n},
              {"family", std::move(fam)},
              {"stage_log", std::move(log)},
              {"processed", processed_to_json(s.processed)}};
}

bundle::NcBasisState nc_basis_from_json(const Json& j) {
  return guarded("basis file", [&] {
    require_model(j, "matrix");
    bundle::NcBasisState s;
    s.n = j.at("n").get<std::size_t>();
    for (const Json& f : j.at("family")) {
      s.family.push_back(mat_step_from_json(f));
      if (s.family.back().n() != s.n) throw ParseError("family member dimension differs from n");
    }
    for (const Json& r : j.at("stage_log")) {
      s.stage_log.push_back(bundle::NcStageRecord{r.at("m").get<std::uint64_t>(), r.at("j").get<std::uint64_t>(),
                                                  r.at("k").get<std::uint64_t>(),
                                                  r.at("units_added").get<std::size_t>(),
                                                  r.at("residual_norm2_sq").get<double>()});
    }
    s.processed = processed_from_json(j.at("processed"));
    return s;
  });
}

Json to_json(const bundle::NcPursuitResult& r) {
  const bundle::NcPursuitTrace& t = r.trace;
  Json steps = Json::array();
  for (const bundle::NcPursuitStep& s : t.iterations) {
    steps.push_back(Json{{"k", s.k},
                         {"alpha", s.alpha},
                         {"norm2_sq_after", s.norm2_sq_after},
                         {"norm_inf_after", s.norm_inf_after},
                         {"unit", to_json(s.unit)}});
  }
  return Json{{"model", "matrix"},
              {"epsilon", to_json(t.epsilon)},
              {"norm2_sq_initial", t.norm2_sq_initial},
              {"norm_inf_initial", t.norm_inf_initial},
              {"iteration_bound", t.iteration_bound},
              {"iteration_bound_saturated", t.iteration_bound == kBoundSaturated},
              {"projection_coeffs", r.projection_coeffs},
              {"iterations", std::move(steps)},
              {"residual", to_json(r.residual)}};
}

Json to_json(const bundle::NcVerifyReport& r) {
  Json witnesses = Json::array();
  for (const bundle::NcMemberWitness& w : r.unitary_witnesses) {
    witnesses.push_back(Json{{"member", w.member}, {"cell", w.cell}, {"defect", w.defect}});
  }
  Json pairs = Json::array();
  for (const bundle::NcPairCertificate& p : r.pairs) {
    Json e{{"j", p.j}, {"k", p.k}, {"status", to_string(p.status)}, {"bound", p.bound}};
    if (p.status != PairStatus::not_certified) e["distance_sq"] = p.distance_sq;
    pairs.push_back(std::move(e));
  }
  return Json{{"model", "matrix"},
              {"pass", r.pass()},
              {"first_member_is_identity", r.first_member_is_identity},
              {"gram_pass", r.gram_pass},
              {"gram_max_error", r.gram_max_error},
              {"gram_worst", Json::array({r.gram_worst_row, r.gram_worst_col})},
              {"unitary_pass", r.unitary_pass},
              {"unitary_witnesses", std::move(witnesses)},
              {"completeness_pass", r.completeness_pass},
              {"pairs", std::move(pairs)}};
}

std::string model_of(const Json& j) {
  if (!j.is_object() || !j.contains("model") || !j.at("model").is_string()) {
    throw ParseError("artifact has no \"model\" field");
  }
  return j.at("model").get<std::string>();
}

}  // namespace sau::io
