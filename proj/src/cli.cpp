#include "sau/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "sau/basis_engine.hpp"
#include "sau/lyapunov.hpp"
#include "sau/matrix_bundle.hpp"
#include "sau/pursuit.hpp"
#include "sau/serialize.hpp"

namespace sau::cli {
namespace {

using io::Json;
namespace bn = sau::bundle;

struct RunConfig {
  std::string model = "abelian";
  std::size_t n = 1;
  std::uint64_t stages = 0;
  std::size_t cell_ceiling = std::numeric_limits<std::size_t>::max();
  std::string split_rule = "vertex";
  bn::Tolerances tol{};
  std::string output;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct VerifyArgs {
  std::string path;
  std::uint64_t j_max = 0;
  std::uint64_t k_max = 0;
  std::string report;
};

struct PursueArgs {
  std::string target;
  std::string family;
  std::string epsilon;
  bool csv = false;
};

struct BoundArgs {
  std::string norm2_sq;
  std::string norm_inf;
  std::string epsilon;
};

struct ShowArgs {
  std::string path;
  std::optional<std::size_t> member;
};

void add_model_flags(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--model", cfg.model, "abelian (exact rationals) or matrix (M_n-valued, floating point)")
      ->check(CLI::IsMember({"abelian", "matrix"}));
  cmd.add_option("--n", cfg.n, "matrix size for --model matrix")->check(CLI::Range(1, 8));
  cmd.add_option("--cell-ceiling", cfg.cell_ceiling, "abort when a function exceeds this many cells")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--split-rule", cfg.split_rule, "projection extraction rule (abelian model)")
      ->check(CLI::IsMember({"vertex", "cellwise"}));
  cmd.add_option("--tol-eig", cfg.tol.eig, "eigenvalue clipping tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--tol-alg", cfg.tol.alg, "algebraic identity tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--tol-match", cfg.tol.match, "constraint matching tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--tol-energy", cfg.tol.energy, "energy identity tolerance")->check(CLI::PositiveNumber);
}

LyapunovOptions lyapunov_options(const RunConfig& cfg) {
  return LyapunovOptions{split_rule_from_string(cfg.split_rule), cfg.cell_ceiling};
}

bn::NcOptions nc_options(const RunConfig& cfg) { return bn::NcOptions{cfg.tol, cfg.cell_ceiling}; }

void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_file(path, contents);
  }
}

// ---- build ----

int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto summary = [&](std::uint64_t m, std::uint64_t j, std::uint64_t k, std::size_t units,
                           const std::string& residual, std::size_t family) {
    out << "stage " << m << " (j=" << j << ", k=" << k << "): units added " << units << ", residual norm2_sq "
        << residual << ", family size " << family << "\n";
  };
  std::string contents;
  if (cfg.model == "abelian") {
    StageOptions opts;
    opts.lyapunov = lyapunov_options(cfg);
    opts.on_stage = [&](const StageRecord& r, const BasisState& s) {
      summary(r.m, r.j, r.k, r.units_added, r.residual_norm2_sq.str(), s.family.size());
    };
    contents = io::dump(io::to_json(run_stages(cfg.stages, opts)));
  } else {
    const bn::NcOptions opts = nc_options(cfg);
    bn::NcBasisState state = bn::nc_initial_state(cfg.n);
    for (std::uint64_t m = 0; m < cfg.stages; ++m) {
      bn::nc_advance_stage(state, opts);
      const bn::NcStageRecord& r = state.stage_log.back();
      std::ostringstream res;
      res << std::setprecision(17) << r.residual_norm2_sq;
      summary(r.m, r.j, r.k, r.units_added, res.str(), state.family.size());
    }
    contents = io::dump(io::to_json(state));
  }
  write_file(cfg.output, contents);
  err << "wrote " << cfg.output << "\n";
  return kExitPass;
}

// ---- verify ----

int cmd_verify(const RunConfig& cfg, const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  const Json doc = io::parse(read_file(args.path));
  const std::string model = io::model_of(doc);
  Json report;
  bool pass = false;
  if (model == "abelian") {
    const BasisState state = io::basis_from_json(doc);
    const PairIndex extent = processed_extent(state);
    const VerifyReport r = verify_basis(state, args.j_max ? args.j_max : extent.j,
                                        args.k_max ? args.k_max : extent.k, cfg.jobs);
    pass = r.pass();
    report = io::to_json(r);
  } else if (model == "matrix") {
    const bn::NcBasisState state = io::nc_basis_from_json(doc);
    std::uint64_t j_max = 0, k_max = 0;
    for (const PairIndex& p : state.processed) {
      j_max = std::max(j_max, p.j);
      k_max = std::max(k_max, p.k);
    }
    const bn::NcVerifyReport r = bn::nc_verify_basis(state, args.j_max ? args.j_max : j_max,
                                                     args.k_max ? args.k_max : k_max, cfg.tol, cfg.jobs);
    pass = r.pass();
    report = io::to_json(r);
  } else {
    throw ParseError("unknown model \"" + model + "\"");
  }
  emit(args.report, io::dump(report), out);
  err << (pass ? "verification passed" : "verification FAILED") << "\n";
  return pass ? kExitPass : kExitVerifyFailed;
}

// ---- pursue ----

std::uint64_t parse_index(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<Rational> parse_rational_list(std::string_view text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(Rational::parse(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

StepFn rademacher(std::uint64_t k) {
  if (k == 0 || k > 40) throw DomainError("rademacher index must be in [1, 40]");
  const std::uint64_t cells = std::uint64_t{1} << k;
  std::vector<Rational> bp;
  std::vector<Rational> vals;
  for (std::uint64_t i = 0; i <= cells; ++i) bp.push_back(Rational(static_cast<long>(i), static_cast<long>(cells)));
  for (std::uint64_t i = 0; i < cells; ++i) vals.push_back(i % 2 == 0 ? Rational(1) : Rational(-1));
  return canonicalize(std::move(bp), std::move(vals));
}

StepFn random_step(std::uint64_t cells, std::uint64_t seed) {
  if (cells == 0 || cells > 4096) throw DomainError("random target needs 1..4096 cells");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> num(-8, 8);
  std::vector<Rational> bp{Rational(0)};
  std::vector<Rational> vals;
  for (std::uint64_t i = 1; i < cells; ++i) bp.push_back(Rational(static_cast<long>(i), static_cast<long>(cells)));
  bp.push_back(Rational(1));
  for (std::uint64_t i = 0; i < cells; ++i) vals.push_back(Rational(num(rng), 4));
  return canonicalize(std::move(bp), std::move(vals));
}

bn::MatStepFn random_hermitian_step(std::uint64_t cells, std::size_t n, std::uint64_t seed) {
  if (cells == 0 || cells > 4096) throw DomainError("random target needs 1..4096 cells");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(n);
  std::vector<Rational> bp{Rational(0)};
  std::vector<bn::Matrix> mats;
  for (std::uint64_t i = 1; i < cells; ++i) bp.push_back(Rational(static_cast<long>(i), static_cast<long>(cells)));
  bp.push_back(Rational(1));
  for (std::uint64_t i = 0; i < cells; ++i) {
    bn::Matrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = bn::Complex(coord(rng), coord(rng));
    }
    mats.push_back((m + m.adjoint()) / 2.0);
  }
  return bn::MatStepFn::from_cells(std::move(bp), std::move(mats));
}

// Target forms: dense:J, rademacher:K, random:CELLS, step:BREAKPOINTS:VALUES, @file.
StepFn parse_abelian_target(const std::string& spec, std::uint64_t seed) {
  if (spec.starts_with("@")) return io::step_from_json(io::parse(read_file(spec.substr(1))));
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) throw ParseError("target '" + spec + "' has no kind prefix");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "dense") return dense_element(parse_index(rest, "dense index"));
  if (kind == "rademacher") return rademacher(parse_index(rest, "rademacher index"));
  if (kind == "random") return random_step(parse_index(rest, "cell count"), seed);
  if (kind == "step") {
    const std::size_t sep = rest.find(':');
    if (sep == std::string::npos) throw ParseError("step target needs BREAKPOINTS:VALUES");
    try {
      return canonicalize(parse_rational_list(std::string_view(rest).substr(0, sep)),
                          parse_rational_list(std::string_view(rest).substr(sep + 1)));
    } catch (const StructuralError& e) {
      throw ParseError(std::string("step target: ") + e.what());
    }
  }
  throw ParseError("unknown target kind '" + kind + "'");
}

bn::MatStepFn parse_matrix_target(const std::string& spec, std::size_t n, std::uint64_t seed) {
  if (spec.starts_with("@")) return io::mat_step_from_json(io::parse(read_file(spec.substr(1))));
  if (spec.starts_with("dense:")) return bn::nc_dense_element(parse_index(spec.substr(6), "dense index"), n);
  if (spec.starts_with("random:")) return random_hermitian_step(parse_index(spec.substr(7), "cell count"), n, seed);
  const auto id = bn::Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return bn::MatStepFn::tensor(parse_abelian_target(spec, seed), id);
}

std::string approx(const Rational& r) {
  std::ostringstream s;
  s << std::setprecision(10) << r.to_double();
  return s.str();
}

std::string approx(double d) {
  std::ostringstream s;
  s << std::setprecision(10) << d;
  return s.str();
}

void print_table(std::ostream& out, bool csv, const std::vector<std::vector<std::string>>& rows) {
  if (csv) {
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
      out << "\n";
    }
    return;
  }
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << row[c];
    }
    out << "\n";
  }
}

int cmd_pursue(const RunConfig& cfg, const PursueArgs& args, std::ostream& out, std::ostream& err) {
  const Rational eps = Rational::parse(args.epsilon);
  std::vector<std::vector<std::string>> rows;
  std::string contents;
  if (cfg.model == "abelian") {
    const StepFn a = parse_abelian_target(args.target, cfg.seed);
    OrthoFamily fam;
    if (!args.family.empty()) {
      fam = OrthoFamily::from_members(io::basis_from_json(io::parse(read_file(args.family))).family.members());
    }
    PursuitOptions opts;
    opts.lyapunov = lyapunov_options(cfg);
    opts.on_step = [&](const PursuitStep& s) { err << "step " << s.k << ": alpha " << s.alpha << "\n"; };
    const PursuitResult res = pursue(a, fam, eps, opts);
    rows.push_back({"k", "alpha", "alpha_approx", "norm2_sq", "norm2_sq_approx", "norm_inf"});
    rows.push_back({"0", "", "", res.trace.norm2_sq_initial.str(), approx(res.trace.norm2_sq_initial),
                    res.trace.norm_inf_initial.str()});
    for (const PursuitStep& s : res.trace.iterations) {
      rows.push_back({std::to_string(s.k), s.alpha.str(), approx(s.alpha), s.norm2_sq_after.str(),
                      approx(s.norm2_sq_after), s.norm_inf_after.str()});
    }
    contents = io::dump(io::to_json(res));
  } else {
    const bn::MatStepFn a = parse_matrix_target(args.target, cfg.n, cfg.seed);
    std::vector<bn::MatStepFn> fam{bn::MatStepFn::identity(a.n())};
    if (!args.family.empty()) fam = io::nc_basis_from_json(io::parse(read_file(args.family))).family;
    const bn::NcPursuitResult res = bn::nc_pursue(a, fam, eps, nc_options(cfg));
    rows.push_back({"k", "alpha", "norm2_sq", "norm_inf"});
    rows.push_back({"0", "", approx(res.trace.norm2_sq_initial), approx(res.trace.norm_inf_initial)});
    for (const bn::NcPursuitStep& s : res.trace.iterations) {
      rows.push_back({std::to_string(s.k), approx(s.alpha), approx(s.norm2_sq_after), approx(s.norm_inf_after)});
    }
    contents = io::dump(io::to_json(res));
  }
  print_table(out, args.csv, rows);
  if (!cfg.output.empty()) {
    write_file(cfg.output, contents);
    err << "wrote " << cfg.output << "\n";
  }
  return kExitPass;
}

// ---- bound ----

int cmd_bound(const BoundArgs& args, std::ostream& out) {
  const std::uint64_t n = iteration_bound(Rational::parse(args.norm2_sq), Rational::parse(args.norm_inf),
                                          Rational::parse(args.epsilon));
  if (n == kBoundSaturated) {
    out << "saturated\n";
  } else {
    out << n << "\n";
  }
  return kExitPass;
}

// ---- show ----

int cmd_show(const ShowArgs& args, std::ostream& out) {
  const Json doc = io::parse(read_file(args.path));
  const std::string model = io::model_of(doc);
  if (!doc.contains("family")) throw ParseError("show expects a basis file");
  const Json& family = doc.at("family");
  if (!args.member) {
    out << "model " << model << ", " << family.size() << " members, " << doc.at("stage_log").size() << " stages\n";
    for (std::size_t i = 0; i < family.size(); ++i) {
      out << "  member " << i << ": " << family[i].at("breakpoints").size() - 1 << " cells\n";
    }
    return kExitPass;
  }
  const std::size_t i = *args.member;
  if (i >= family.size()) throw DomainError("member " + std::to_string(i) + " out of range");
  if (model == "abelian") {
    const StepFn f = io::step_from_json(family[i]);
    std::vector<std::vector<std::string>> rows{{"cell", "lo", "hi", "value"}};
    for (std::size_t c = 0; c < f.cells(); ++c) {
      rows.push_back({std::to_string(c), f.breakpoints()[c].str(), f.breakpoints()[c + 1].str(), f.values()[c].str()});
    }
    print_table(out, false, rows);
  } else {
    const bn::MatStepFn f = io::mat_step_from_json(family[i]);
    const Eigen::IOFormat fmt(6, 0, ", ", "\n", "    [", "]");
    for (std::size_t c = 0; c < f.cell_count(); ++c) {
      out << "cell " << c << " [" << f.breakpoints()[c] << ", " << f.breakpoints()[c + 1] << ")\n";
      out << f.cells()[c].format(fmt) << "\n";
    }
  }
  return kExitPass;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return s.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << contents;
  f.flush();
  if (!f) throw IoError("error writing '" + path + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-adjoint unitary bases: build, verify and inspect certified artifacts"};
  app.name("sau");
  app.require_subcommand(1);

  RunConfig cfg;
  VerifyArgs verify;
  PursueArgs pursue_args;
  BoundArgs bound;
  ShowArgs show;

  CLI::App* build_cmd = app.add_subcommand("build", "run the staged basis construction and write the basis file");
  add_model_flags(*build_cmd, cfg);
  build_cmd->add_option("--stages", cfg.stages, "number of stages")->required()->check(CLI::NonNegativeNumber);
  build_cmd->add_option("-o,--output", cfg.output, "basis file to write")->required();

  CLI::App* verify_cmd = app.add_subcommand("verify", "re-certify a basis file; exit 0 iff every check passes");
  add_model_flags(*verify_cmd, cfg);
  verify_cmd->add_option("path", verify.path, "basis file")->required();
  verify_cmd->add_option("--j-max", verify.j_max, "largest dense index to certify (default: processed extent)");
  verify_cmd->add_option("--k-max", verify.k_max, "largest precision level to certify (default: processed extent)");
  verify_cmd->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::Range(1u, 256u));
  verify_cmd->add_option("-o,--output", verify.report, "write the JSON report here instead of stdout");

  CLI::App* pursue_cmd = app.add_subcommand("pursue", "peel norming unitaries off a target until |a|_2 < epsilon");
  add_model_flags(*pursue_cmd, cfg);
  pursue_cmd->add_option("target", pursue_args.target, "dense:J | rademacher:K | random:CELLS | step:BPS:VALS | @file")
      ->required();
  pursue_cmd->add_option("--family", pursue_args.family, "basis file whose family the target is pursued against");
  pursue_cmd->add_option("--epsilon", pursue_args.epsilon, "stopping threshold, a positive rational")->required();
  pursue_cmd->add_option("--seed", cfg.seed, "seed for random: targets");
  pursue_cmd->add_flag("--csv", pursue_args.csv, "print the decay table as CSV");
  pursue_cmd->add_option("-o,--output", cfg.output, "trace file to write");

  CLI::App* bound_cmd = app.add_subcommand("bound", "a-priori iteration bound for given initial norms and epsilon");
  bound_cmd->add_option("norm2_sq", bound.norm2_sq, "|a0|_2^2 as a rational")->required();
  bound_cmd->add_option("norm_inf", bound.norm_inf, "|a0|_inf as a rational")->required();
  bound_cmd->add_option("epsilon", bound.epsilon, "epsilon as a rational")->required();

  CLI::App* show_cmd = app.add_subcommand("show", "summarize a basis file or print one family member");
  show_cmd->add_option("path", show.path, "basis file")->required();
  show_cmd->add_option("--member", show.member, "index of the member to print");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (*build_cmd) return cmd_build(cfg, out, err);
    if (*verify_cmd) return cmd_verify(cfg, verify, out, err);
    if (*pursue_cmd) return cmd_pursue(cfg, pursue_args, out, err);
    if (*bound_cmd) return cmd_bound(bound, out);
    if (*show_cmd) return cmd_show(show, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const StageError& e) {
    err << "aborted in stage " << e.stage() << ": " << e.what() << "\n";
    return kExitDomain;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitParse;
}

}  // namespace sau::cli
