// Command-line driver: solve sparse least-squares systems with the sketched
// preconditioner pipelines, assemble random-feature PDE systems, and dump
// singular-value spectra.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "cslsq/cslsq.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct SolveArgs {
  std::string matrix;
  std::string rhs = "synthetic";
  std::string method = "csqrp";
  double gamma = 3.0;
  double rcond = 1e-12;
  double tau = 1e-8;
  std::size_t max_iter = 0;
  std::optional<std::uint64_t> seed;
  bool warm_start = false;
  bool kappa = false;
  bool history = false;
  std::string out_format = "json";
  std::string report_path = "-";
  std::string spectrum_path;
};

std::uint64_t default_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CSLSQ_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw cslsq::ConfigError("CSLSQ_SEED is not an integer");
    }
  }
  return 1;
}

// "synthetic" or "synthetic:<seed>": b = A x* with Gaussian x*.
cslsq::Vector make_rhs(const cslsq::CsrMatrix& A, const std::string& spec,
                       std::uint64_t fallback_seed) {
  if (spec.rfind("synthetic", 0) == 0) {
    std::uint64_t seed = fallback_seed;
    if (spec.size() > 9) {
      if (spec[9] != ':')
        throw cslsq::ConfigError("bad --rhs spec '" + spec + "'");
      try {
        seed = std::stoull(spec.substr(10));
      } catch (const std::exception&) {
        throw cslsq::ConfigError("bad --rhs seed in '" + spec + "'");
      }
    }
    cslsq::Rng rng(seed);
    std::vector<double> xs(A.cols);
    for (auto& v : xs) v = rng.normal();
    return spmv(A, cslsq::Vector::from_raw(std::move(xs)));
  }
  return cslsq::read_rhs(spec);
}

int run_solve(const SolveArgs& a) {
  const cslsq::CsrMatrix A = cslsq::read_matrix_market(a.matrix);
  const std::uint64_t seed = default_seed(a.seed);
  const cslsq::Vector b = make_rhs(A, a.rhs, seed);
  if (b.size() != A.rows)
    throw cslsq::ConfigError("rhs length " + std::to_string(b.size()) +
                             " does not match matrix rows " +
                             std::to_string(A.rows));

  cslsq::SolveOptions opts;
  opts.tau = a.tau;
  opts.max_iter = a.max_iter;
  opts.record_history = a.history;
  opts.use_warm_start = a.warm_start;
  opts.compute_kappa_B = a.kappa;

  cslsq::BenchReport rep;
  rep.method = a.method;
  rep.m = A.rows;
  rep.n = A.cols;
  rep.config = {{"matrix", a.matrix},
                {"rhs", a.rhs},
                {"gamma", std::to_string(a.gamma)},
                {"rcond", std::to_string(a.rcond)},
                {"tau", std::to_string(a.tau)},
                {"max_iter", std::to_string(a.max_iter)},
                {"seed", std::to_string(seed)},
                {"warm_start", a.warm_start ? "true" : "false"}};

  cslsq::SolveReport sr;
  try {
    if (a.method == "csqrp") {
      sr = cslsq::csqrp_lsqr(A, b, a.gamma, seed, opts);
    } else if (a.method == "cssvdp") {
      sr = cslsq::cssvdp_lsqr(A, b, a.gamma, a.rcond, seed, opts);
    } else if (a.method == "csqr_p") {
      sr = cslsq::csqr_plsqr(A, b, a.gamma, seed, opts);
    } else if (a.method == "cssvd_p") {
      sr = cslsq::cssvd_plsqr(A, b, a.gamma, a.rcond, seed, opts);
    } else if (a.method == "lsqr") {
      cslsq::SolveOptions plain = opts;
      plain.use_warm_start = false;
      sr = cslsq::lsqr(cslsq::operator_from_csr(A), b, plain);
    } else if (a.method == "direct") {
      sr = cslsq::direct_dense_ls(A, b);
    } else {
      throw cslsq::ConfigError("unknown method '" + a.method + "'");
    }
  } catch (const cslsq::RankDeficient& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const cslsq::SvdFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }

  rep.pcpu_seconds = sr.precond_time;
  rep.cpu_seconds = sr.solve_time;
  rep.tcpu_seconds = sr.precond_time + sr.solve_time;
  if (a.method != "direct") rep.iterations = sr.iterations;
  rep.rel_ls_error = sr.relative_ls_error;
  rep.relative_residual = sr.relative_residual;
  rep.kappa_b = sr.kappa_B;
  rep.effective_rank = sr.effective_rank;
  cslsq::write_report(rep, a.report_path, a.out_format);

  if (!a.spectrum_path.empty()) {
    const cslsq::SpectrumData sp =
        cslsq::compute_spectrum(A, a.gamma, a.rcond, seed);
    cslsq::write_spectrum_csv(sp, a.spectrum_path);
  }
  return kExitOk;
}

struct AssembleArgs {
  std::string pde_config;
  std::string out_matrix = "rfm_A.mtx";
  std::string out_rhs = "rfm_b.mtx";
  std::string out_manifest = "rfm_manifest.json";
  std::string solve_method;  // optional: also solve and report
  std::string out_format = "json";
  std::string report_path = "-";
  double gamma = 3.0;
  double rcond = 1e-12;
  double tau = 1e-8;
  std::optional<std::uint64_t> solver_seed;
};

int run_assemble(const AssembleArgs& a) {
  using namespace cslsq::rfm;
  const cslsq::KvConfig cfg = cslsq::KvConfig::parse_file(a.pde_config);
  static const std::set<std::string> known = {
      "x0",  "x1", "y0", "y1",  "operator", "k",        "exact",
      "nx",  "ny", "q",  "nb",  "jn",       "pou",      "weight_bound",
      "seed", "lambda_i", "lambda_b", "lambda_c"};
  for (const auto& [key, value] : cfg.entries())
    if (!known.count(key))
      throw cslsq::ConfigError("unknown PDE config key '" + key + "'");

  Rect domain{cfg.get_double("x0", 0.0), cfg.get_double("x1", 1.0),
              cfg.get_double("y0", 0.0), cfg.get_double("y1", 1.0)};
  const std::string op_name = cfg.get("operator", "laplace");
  PdeSpec::Op op;
  if (op_name == "laplace")
    op = PdeSpec::Op::kLaplace;
  else if (op_name == "helmholtz")
    op = PdeSpec::Op::kHelmholtz;
  else
    throw cslsq::ConfigError("unknown operator '" + op_name + "'");
  const double k = cfg.get_double("k", 0.0);
  if (k < 0.0) throw cslsq::ConfigError("wave number k must be >= 0");
  const auto [u_exact, lap_exact] = exact_solution(cfg.get("exact", "sin_sin"));
  const PdeSpec pde = manufactured_pde(op, k, domain, u_exact, lap_exact);

  const std::string pou_name = cfg.get("pou", "psi_b");
  PouKind pou;
  if (pou_name == "psi_a")
    pou = PouKind::kPsiA;
  else if (pou_name == "psi_b")
    pou = PouKind::kPsiB;
  else
    throw cslsq::ConfigError("unknown pou '" + pou_name + "'");

  const std::size_t nx = cfg.get_count("nx", 2);
  const std::size_t ny = cfg.get_count("ny", 2);
  const std::size_t q = cfg.get_count("q", 20);
  const std::size_t nb = cfg.get_count("nb", 40);
  const std::size_t jn = cfg.get_count("jn", 100);
  const double weight_bound = cfg.get_double("weight_bound", 1.0);
  const std::uint64_t seed = cfg.get_count("seed", 1);

  const Partition part = make_partition(domain, nx, ny, pou);
  const FeatureSet feats = make_features(part, jn, weight_bound, seed);
  CollocationSet colloc = make_collocation(part, q, nb);
  colloc.lambda_i = cfg.get_double("lambda_i", 1.0);
  colloc.lambda_b = cfg.get_double("lambda_b", 0.0);
  colloc.lambda_c = cfg.get_double("lambda_c", 1.0);

  const auto [A, b] = assemble(pde, part, feats, colloc);
  cslsq::write_matrix_market(A, a.out_matrix);
  cslsq::write_rhs(b, a.out_rhs);

  nlohmann::ordered_json manifest;
  manifest["domain"] = {{"x0", domain.x0},
                        {"x1", domain.x1},
                        {"y0", domain.y0},
                        {"y1", domain.y1}};
  manifest["operator"] = op_name;
  manifest["k"] = k;
  manifest["exact"] = cfg.get("exact", "sin_sin");
  manifest["nx"] = nx;
  manifest["ny"] = ny;
  manifest["q"] = q;
  manifest["nb"] = nb;
  manifest["jn"] = jn;
  manifest["pou"] = pou_name;
  manifest["weight_bound"] = weight_bound;
  manifest["seed"] = seed;
  manifest["lambda_i"] = colloc.lambda_i;
  manifest["lambda_b"] = colloc.lambda_b;
  manifest["lambda_c"] = colloc.lambda_c;
  manifest["m"] = A.rows;
  manifest["n"] = A.cols;
  manifest["m_interior"] = colloc.interior.size();
  manifest["m_boundary"] = colloc.boundary.size();
  manifest["matrix_file"] = a.out_matrix;
  manifest["rhs_file"] = a.out_rhs;
  {
    std::ofstream mf(a.out_manifest);
    if (!mf)
      throw std::runtime_error("cannot write manifest " + a.out_manifest);
    mf << manifest.dump(2) << "\n";
  }

  if (!a.solve_method.empty()) {
    const std::uint64_t sseed = default_seed(a.solver_seed);
    cslsq::SolveOptions opts;
    opts.tau = a.tau;
    cslsq::SolveReport sr;
    try {
      if (a.solve_method == "csqrp")
        sr = cslsq::csqrp_lsqr(A, b, a.gamma, sseed, opts);
      else if (a.solve_method == "cssvdp")
        sr = cslsq::cssvdp_lsqr(A, b, a.gamma, a.rcond, sseed, opts);
      else if (a.solve_method == "direct")
        sr = cslsq::direct_dense_ls(A, b);
      else
        throw cslsq::ConfigError("unknown --solve method '" + a.solve_method +
                                 "'");
    } catch (const cslsq::RankDeficient& e) {
      std::cerr << "solver failure: " << e.what() << "\n";
      return kExitSolver;
    } catch (const cslsq::SvdFailure& e) {
      std::cerr << "solver failure: " << e.what() << "\n";
      return kExitSolver;
    }
    cslsq::BenchReport rep;
    rep.method = a.solve_method;
    rep.m = A.rows;
    rep.n = A.cols;
    rep.pcpu_seconds = sr.precond_time;
    rep.cpu_seconds = sr.solve_time;
    rep.tcpu_seconds = sr.precond_time + sr.solve_time;
    if (a.solve_method != "direct") rep.iterations = sr.iterations;
    rep.rel_ls_error = sr.relative_ls_error;
    rep.relative_residual = sr.relative_residual;
    rep.effective_rank = sr.effective_rank;
    rep.pde_l2_error = relative_l2_error(part, feats, sr.x, pde.exact);
    rep.config = {{"pde_config", a.pde_config},
                  {"gamma", std::to_string(a.gamma)},
                  {"rcond", std::to_string(a.rcond)},
                  {"tau", std::to_string(a.tau)},
                  {"seed", std::to_string(sseed)}};
    cslsq::write_report(rep, a.report_path, a.out_format);
  }
  return kExitOk;
}

struct SpectrumArgs {
  std::string matrix;
  std::string out = "spectrum.csv";
  double gamma = 3.0;
  double rcond = 1e-12;
  std::optional<std::uint64_t> seed;
};

int run_spectrum(const SpectrumArgs& a) {
  const cslsq::CsrMatrix A = cslsq::read_matrix_market(a.matrix);
  const cslsq::SpectrumData sp =
      cslsq::compute_spectrum(A, a.gamma, a.rcond, default_seed(a.seed));
  cslsq::write_spectrum_csv(sp, a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketched-preconditioned sparse least squares toolkit"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "Solve min ||Ax - b||");
  solve->add_option("--matrix", sa.matrix, "Matrix Market file")->required();
  solve->add_option("--rhs", sa.rhs,
                    "rhs file, or synthetic[:seed] for b = A x*");
  solve->add_option("--method", sa.method,
                    "csqrp|cssvdp|csqr_p|cssvd_p|lsqr|direct");
  solve->add_option("--gamma", sa.gamma, "sketch oversampling factor");
  solve->add_option("--rcond", sa.rcond, "SVD truncation constant");
  solve->add_option("--tau", sa.tau, "relative tolerance");
  solve->add_option("--max-iter", sa.max_iter, "iteration cap (0 = n)");
  solve->add_option("--seed", sa.seed, "sketch seed (env CSLSQ_SEED)");
  solve->add_flag("--warm-start", sa.warm_start, "start from Q^T S b");
  solve->add_flag("--kappa", sa.kappa, "report cond(B)");
  solve->add_flag("--history", sa.history, "record residual history");
  solve->add_option("--out", sa.out_format, "report format: json|csv");
  solve->add_option("--report", sa.report_path, "report path (- = stdout)");
  solve->add_option("--spectrum", sa.spectrum_path,
                    "also write singular-value CSV here");

  AssembleArgs aa;
  CLI::App* asmb = app.add_subcommand(
      "assemble-rfm", "Assemble a random-feature PDE least-squares system");
  asmb->add_option("--pde", aa.pde_config, "PDE config file")->required();
  asmb->add_option("--out-matrix", aa.out_matrix, "output Matrix Market file");
  asmb->add_option("--out-rhs", aa.out_rhs, "output rhs file");
  asmb->add_option("--out-manifest", aa.out_manifest, "output manifest JSON");
  asmb->add_option("--solve", aa.solve_method,
                   "also solve (csqrp|cssvdp|direct) and report");
  asmb->add_option("--gamma", aa.gamma, "sketch oversampling factor");
  asmb->add_option("--rcond", aa.rcond, "SVD truncation constant");
  asmb->add_option("--tau", aa.tau, "relative tolerance");
  asmb->add_option("--seed", aa.solver_seed, "solver sketch seed");
  asmb->add_option("--out", aa.out_format, "report format: json|csv");
  asmb->add_option("--report", aa.report_path, "report path (- = stdout)");

  SpectrumArgs pa;
  CLI::App* spec = app.add_subcommand(
      "spectrum", "Singular values of A, A R^{-1}, A P");
  spec->add_option("--matrix", pa.matrix, "Matrix Market file")->required();
  spec->add_option("--out", pa.out, "output CSV path");
  spec->add_option("--gamma", pa.gamma, "sketch oversampling factor");
  spec->add_option("--rcond", pa.rcond, "SVD truncation constant");
  spec->add_option("--seed", pa.seed, "sketch seed (env CSLSQ_SEED)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return run_solve(sa);
    if (asmb->parsed()) return run_assemble(aa);
    if (spec->parsed()) return run_spectrum(pa);
  } catch (const cslsq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cslsq::MatrixMarketError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
