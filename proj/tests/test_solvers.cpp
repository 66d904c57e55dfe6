#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cslsq/solvers.hpp"
#include "helpers.hpp"

using namespace cslsq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testutil::gaussian_vector;
using testutil::make_rhs;
using testutil::residual_norm;
using testutil::synthetic_kappa;
using testutil::synthetic_rank_deficient;

namespace {

// Normal-equations reference solve (A^T A) x = A^T b via dense QR of A.
Vector normal_eq_solve(const CsrMatrix& A, const Vector& b) {
  return direct_dense_ls(A, b).x;
}

}  // namespace

TEST_CASE("lsqr trivial cases", "[lsqr]") {
  const CsrMatrix A =
      csr_from_triplets(3, 2, {{0, 0, 2.0}, {1, 1, 3.0}, {2, 0, 1.0}});
  const LinearOperator op = operator_from_csr(A);

  // zero rhs -> zero solution, zero iterations
  const SolveReport z = lsqr(op, Vector(3));
  CHECK(z.stop_reason == StopReason::kZeroRhs);
  CHECK(z.iterations == 0);
  CHECK(z.x == Vector(2));
  CHECK(z.relative_residual == 0.0);

  CHECK_THROWS_AS(lsqr(op, Vector(2)), std::invalid_argument);
  SolveOptions bad;
  bad.tau = 0.0;
  CHECK_THROWS_AS(lsqr(op, Vector(3), bad), std::invalid_argument);
}

TEST_CASE("lsqr solves an orthonormal system immediately", "[lsqr]") {
  Rng rng(17);
  const DenseMatrix Q = testutil::random_orthonormal(30, 6, rng);
  const Vector y = gaussian_vector(6, 2);
  // b = Q y is consistent; LSQR needs a single iteration
  std::vector<double> b(30, 0.0);
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t j = 0; j < 6; ++j) b[i] += Q.at(i, j) * y[j];
  const SolveReport rep = lsqr(operator_from_dense(Q),
                               Vector::from_raw(std::move(b)));
  CHECK(rep.iterations <= 2);
  CHECK(rep.relative_residual < 1e-10);
  for (std::size_t j = 0; j < 6; ++j)
    REQUIRE_THAT(rep.x[j], WithinAbs(y[j], 1e-10));
}

TEST_CASE("lsqr matches the direct solver", "[lsqr]") {
  const CsrMatrix A = synthetic_kappa(30, 8, 50.0, 3);
  const Vector b = make_rhs(A, 4, 0.3);  // inconsistent
  SolveOptions opts;
  opts.tau = 1e-12;
  opts.max_iter = 200;
  const SolveReport it = lsqr(operator_from_csr(A), b, opts);
  const Vector xd = normal_eq_solve(A, b);
  for (std::size_t j = 0; j < 8; ++j)
    REQUIRE_THAT(it.x[j], WithinAbs(xd[j], 1e-8 * (1.0 + std::abs(xd[j]))));
  // residual norms agree much tighter than the iterates
  CHECK_THAT(residual_norm(A, it.x, b),
             WithinRel(residual_norm(A, xd, b), 1e-12));
}

TEST_CASE("lsqr residual history is monotone", "[lsqr]") {
  const CsrMatrix A = synthetic_kappa(60, 12, 1e3, 8);
  const Vector b = make_rhs(A, 9, 0.1);
  SolveOptions opts;
  opts.record_history = true;
  opts.max_iter = 48;
  opts.tau = 1e-14;
  const SolveReport rep = lsqr(operator_from_csr(A), b, opts);
  REQUIRE(rep.residual_history.has_value());
  REQUIRE(!rep.residual_history->empty());
  for (std::size_t k = 1; k < rep.residual_history->size(); ++k)
    REQUIRE((*rep.residual_history)[k] <=
            (*rep.residual_history)[k - 1] * (1.0 + 1e-12));
}

TEST_CASE("lsqr honors an initial iterate", "[lsqr]") {
  const CsrMatrix A = synthetic_kappa(40, 6, 10.0, 12);
  const Vector xs = gaussian_vector(6, 13);
  const Vector b = spmv(A, xs);
  SolveOptions opts;
  opts.initial = xs;  // start at the exact solution
  const SolveReport rep = lsqr(operator_from_csr(A), b, opts);
  CHECK(rep.iterations <= 1);
  CHECK(rep.relative_residual < 1e-12);

  SolveOptions wrong;
  wrong.initial = Vector(5);
  CHECK_THROWS_AS(lsqr(operator_from_csr(A), b, wrong),
                  std::invalid_argument);
}

TEST_CASE("lsqr max_iter stop", "[lsqr]") {
  const CsrMatrix A = synthetic_kappa(100, 20, 1e8, 21);
  const Vector b = make_rhs(A, 22, 0.2);
  SolveOptions opts;
  opts.max_iter = 3;
  opts.tau = 1e-14;
  const SolveReport rep = lsqr(operator_from_csr(A), b, opts);
  CHECK(rep.stop_reason == StopReason::kMaxIter);
  CHECK(rep.iterations == 3);
}

TEST_CASE("direct dense solver", "[direct]") {
  // hand system: A = [[1,0],[0,2],[0,0]], b = (3, 8, 5) -> x = (3, 4)
  const CsrMatrix A = csr_from_triplets(3, 2, {{0, 0, 1.0}, {1, 1, 2.0}});
  const SolveReport rep = direct_dense_ls(A, Vector({3.0, 8.0, 5.0}));
  CHECK_THAT(rep.x[0], WithinRel(3.0, 1e-13));
  CHECK_THAT(rep.x[1], WithinRel(4.0, 1e-13));
  // residual is exactly the unreachable component
  CHECK_THAT(rep.relative_residual,
             WithinRel(5.0 / std::sqrt(9.0 + 64.0 + 25.0), 1e-13));
  CHECK_THAT(rep.relative_ls_error,
             WithinRel(25.0 / 98.0, 1e-13));

  CHECK_THROWS_AS(direct_dense_ls(A, Vector(2)), std::invalid_argument);
  CHECK_THROWS_AS(
      direct_dense_ls(csr_from_triplets(2, 3, {{0, 0, 1.0}}), Vector(2)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      direct_dense_ls(synthetic_rank_deficient(20, 6, 3, 10.0, 2),
                      Vector(20)),
      RankDeficient);
}

TEST_CASE("iteration bound values and domain", "[bound]") {
  CHECK(iteration_bound(1e-8, 0.5) == 28);
  CHECK(iteration_bound(0.5, 0.5) == 2);
  CHECK(iteration_bound(1e-4, 0.5) == 15);
  // smaller distortion, faster decay
  CHECK(iteration_bound(1e-8, 0.1) <= iteration_bound(1e-8, 0.5));
  CHECK_THROWS_AS(iteration_bound(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(iteration_bound(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(iteration_bound(1e-8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(iteration_bound(1e-8, 1.0), std::invalid_argument);
}

TEST_CASE("composed solvers match the direct oracle", "[composed]") {
  const CsrMatrix A = synthetic_kappa(200, 15, 50.0, 31);
  const Vector b = make_rhs(A, 32, 0.4);
  const Vector xd = normal_eq_solve(A, b);
  const double rd = residual_norm(A, xd, b);

  SolveOptions opts;
  opts.tau = 1e-12;
  opts.max_iter = 100;

  const SolveReport q = csqrp_lsqr(A, b, 3.0, 5, opts);
  const SolveReport s = cssvdp_lsqr(A, b, 3.0, 1e-12, 5, opts);
  const SolveReport qi = csqr_plsqr(A, b, 3.0, 5, opts);
  const SolveReport si = cssvd_plsqr(A, b, 3.0, 1e-12, 5, opts);

  for (const auto* rep : {&q, &s, &qi, &si}) {
    CHECK_THAT(residual_norm(A, rep->x, b), WithinRel(rd, 1e-10));
    for (std::size_t j = 0; j < 15; ++j)
      REQUIRE_THAT(rep->x[j], WithinAbs(xd[j], 1e-7 * (1.0 + std::abs(xd[j]))));
  }
}

TEST_CASE("composed solver parameter domain", "[composed]") {
  const CsrMatrix A = synthetic_kappa(40, 10, 10.0, 41);
  const Vector b = make_rhs(A, 42);
  // gamma <= 1 rejected
  CHECK_THROWS_AS(csqrp_lsqr(A, b, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(cssvdp_lsqr(A, b, 0.5, 1e-12, 1), std::invalid_argument);
  // rows must exceed gamma * cols
  CHECK_THROWS_AS(csqrp_lsqr(A, b, 5.0, 1), std::invalid_argument);
  CHECK_NOTHROW(csqrp_lsqr(A, b, 3.0, 1));
}

TEST_CASE("qr path flags rank-deficient input", "[composed]") {
  const CsrMatrix A = synthetic_rank_deficient(400, 100, 50, 1e2, 61);
  const Vector b = make_rhs(A, 62, 0.1);
  CHECK_THROWS_AS(csqrp_lsqr(A, b, 3.0, 63), RankDeficient);

  // the svd path shrugs, detects the rank and still solves
  SolveOptions opts;
  opts.tau = 1e-10;
  opts.max_iter = 200;
  const SolveReport rep = cssvdp_lsqr(A, b, 3.0, 1e-12, 63, opts);
  CHECK(rep.relative_ls_error < 0.5);
  REQUIRE(rep.effective_rank.has_value());
  CHECK(*rep.effective_rank == 50);
  // consistency of the returned metrics
  CHECK_THAT(rep.relative_residual * rep.relative_residual,
             WithinRel(rep.relative_ls_error, 1e-10));
}

TEST_CASE("svd path handles a rank-1 matrix", "[composed]") {
  // A = u v^T: effective rank 1 everywhere
  Rng rng(71);
  const std::size_t m = 80, n = 12;
  DenseMatrix A(m, n);
  std::vector<double> uu(m), vv(n);
  for (auto& x : uu) x = rng.normal();
  for (auto& x : vv) x = rng.normal();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) A.at(i, j) = uu[i] * vv[j];
  const CsrMatrix Ac = csr_from_dense(A);
  const Vector b = make_rhs(Ac, 72, 0.5);
  const SolveReport rep = cssvdp_lsqr(Ac, b, 3.0, 1e-12, 73);
  CHECK(rep.iterations <= 3);
  // minimum-residual value matches projection onto span(u)
  Vector un = Vector::from_raw(std::vector<double>(uu));
  scale(un, 1.0 / norm2(un));
  const double proj = dot(un, b);
  const double want = std::sqrt(std::max(0.0, dot(b, b) - proj * proj));
  CHECK_THAT(residual_norm(Ac, rep.x, b), WithinRel(want, 1e-10));
}

TEST_CASE("explicit beats implicit at extreme conditioning", "[composed]") {
  // kappa = 1e14: applying R^{-1} per iteration loses digits that the
  // explicitly formed B retains. Gap must be large and systematic.
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const CsrMatrix A = synthetic_kappa(300, 20, 1e14, 500 + seed);
    const Vector b = make_rhs(A, 600 + seed);  // consistent
    SolveOptions opts;
    opts.tau = 1e-12;
    opts.max_iter = 200;
    const SolveReport ex = csqrp_lsqr(A, b, 3.0, seed, opts);
    const SolveReport im = csqr_plsqr(A, b, 3.0, seed, opts);
    if (ex.relative_residual * 10.0 <= im.relative_residual) ++wins;
  }
  CHECK(wins >= 8);
}

TEST_CASE("warm start shortens consistent solves", "[composed]") {
  const CsrMatrix A = synthetic_kappa(500, 25, 1e4, 81);
  const Vector b = make_rhs(A, 82);  // consistent
  SolveOptions cold;
  cold.tau = 1e-10;
  cold.max_iter = 200;
  SolveOptions warm = cold;
  warm.use_warm_start = true;

  const SolveReport c = csqrp_lsqr(A, b, 3.0, 83, cold);
  const SolveReport w = csqrp_lsqr(A, b, 3.0, 83, warm);
  CHECK(w.relative_residual < 1e-8);
  CHECK(w.iterations < c.iterations);
  CHECK(w.iterations <= 2);  // y0 = R x* is exact here

  // implicit variant takes the same shortcut
  const SolveReport wi = csqr_plsqr(A, b, 3.0, 83, warm);
  CHECK(wi.iterations <= 2);
}

TEST_CASE("kappa_B is reported on request", "[composed]") {
  const CsrMatrix A = synthetic_kappa(150, 10, 1e10, 91);
  const Vector b = make_rhs(A, 92, 0.1);
  SolveOptions opts;
  opts.compute_kappa_B = true;
  const SolveReport q = csqrp_lsqr(A, b, 3.0, 93, opts);
  REQUIRE(q.kappa_B.has_value());
  CHECK(*q.kappa_B < 100.0);
  CHECK(*q.kappa_B >= 1.0);

  const SolveReport plain = csqrp_lsqr(A, b, 3.0, 93);
  CHECK(!plain.kappa_B.has_value());
  CHECK(!plain.effective_rank.has_value());  // qr path has no rank notion

  const SolveReport si = cssvd_plsqr(A, b, 3.0, 1e-12, 93, opts);
  REQUIRE(si.kappa_B.has_value());
  CHECK(*si.kappa_B < 100.0);
  REQUIRE(si.effective_rank.has_value());
  CHECK(*si.effective_rank == 10);  // full rank
}

TEST_CASE("preconditioning rescues a stalled lsqr", "[composed][slow]") {
  // kappa(A) = 1e12 and tau = 1e-8: plain LSQR stalls far from the optimum
  // within n iterations, the preconditioned run converges in a handful.
  const CsrMatrix A = synthetic_kappa(2000, 100, 1e12, 101);
  const Vector b = make_rhs(A, 102);  // consistent: optimum residual 0
  SolveOptions opts;
  opts.tau = 1e-8;  // both solvers get max_iter = n = 100 by default

  const SolveReport plain = lsqr(operator_from_csr(A), b, opts);
  const SolveReport pre = csqrp_lsqr(A, b, 3.0, 103, opts);

  CHECK(plain.relative_residual > 1e-6);
  CHECK(pre.relative_residual < 1e-7);
  CHECK(pre.iterations < 100);
  CHECK(pre.relative_residual * 1e3 < plain.relative_residual);
}

TEST_CASE("iteration bound holds on measured distortion", "[composed][slow]") {
  // LSQR-on-B error contraction: after iteration_bound(tau, eps) steps the
  // energy-norm error is below tau * ||y*||. Checked against the direct
  // solve on the explicitly formed B for ten seeds and two taus.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t m = 200, n = 10;
    Rng rng(3000 + seed);
    const CsrMatrix A = csr_from_dense(testutil::gaussian_dense(m, n, rng));
    const Vector b = make_rhs(A, 4000 + seed, 0.5);
    const CountSketch S =
        new_count_sketch(3 * n, m, 5000 + seed);
    const QrPreconditioner pre = build_qr_precond(apply_left(S, A));
    const DenseMatrix B = form_explicit(A, pre);

    const auto [lo, hi] = embedding_distortion(S, A, 200, 6000 + seed);
    const double eps = distortion_epsilon(lo, hi);
    REQUIRE(eps < 1.0);

    // direct optimum of min ||B y - b||
    const Vector ystar = direct_dense_ls(csr_from_dense(B), b).x;
    const Vector bystar = spmv(csr_from_dense(B), ystar);

    for (const double tau : {1e-4, 1e-8}) {
      const std::size_t kmax = iteration_bound(tau, eps);
      SolveOptions opts;
      opts.tau = 1e-15;  // run to the iteration budget, not to tolerance
      opts.max_iter = kmax;
      const SolveReport rep = lsqr(operator_from_dense(B), b, opts);
      const Vector byk = spmv(csr_from_dense(B), rep.x);
      double err = 0.0, ref = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double d = byk[i] - bystar[i];
        err += d * d;
        ref += bystar[i] * bystar[i];
      }
      INFO("seed " << seed << " tau " << tau << " k " << kmax << " ratio "
                   << std::sqrt(err / ref));
      REQUIRE(err <= tau * tau * ref);
    }
  }
}

TEST_CASE("sketch-and-solve residual inflation stays bounded", "[composed]") {
  // The sketched-problem minimizer x~ satisfies
  // ||Ax~ - b|| <= sqrt((1+eps)/(1-eps)) ||Ax* - b||; verify on a noisy
  // system by solving the sketched problem directly.
  const std::size_t m = 400, n = 20;
  const CsrMatrix A = synthetic_kappa(m, n, 100.0, 111);
  const Vector b = make_rhs(A, 112, 0.5);
  const double ropt = residual_norm(A, normal_eq_solve(A, b), b);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const CountSketch S = new_count_sketch(3 * n, m, seed);
    const DenseMatrix SA = apply_left(S, A);
    const Vector sb = apply_to_vector(S, b);
    const Vector xs = direct_dense_ls(csr_from_dense(SA), sb).x;
    const double rs = residual_norm(A, xs, b);
    const auto [lo, hi] = embedding_distortion(S, A, 200, 2000 + seed);
    // guard: the sampled eps may under-estimate; allow 5%
    const double infl = std::sqrt((1.0 + distortion_epsilon(lo, hi)) /
                                  (1.0 - distortion_epsilon(lo, hi)));
    INFO("seed " << seed << " inflation " << rs / ropt << " allowed "
                 << infl * 1.05);
    REQUIRE(rs >= ropt * (1.0 - 1e-12));  // x* is the true optimum
    REQUIRE(rs <= ropt * infl * 1.05);
  }
}

TEST_CASE("accuracy parity with the direct method at kappa 1e6",
          "[composed]") {
  const CsrMatrix A = synthetic_kappa(600, 30, 1e6, 121);
  const Vector b = make_rhs(A, 122, 0.3);
  const SolveReport d = direct_dense_ls(A, b);
  SolveOptions opts;
  opts.tau = 1e-12;
  opts.max_iter = 300;
  const SolveReport q = csqrp_lsqr(A, b, 3.0, 123, opts);
  const SolveReport s = cssvdp_lsqr(A, b, 3.0, 1e-12, 123, opts);
  CHECK_THAT(q.relative_ls_error, WithinAbs(d.relative_ls_error, 1e-12));
  CHECK_THAT(s.relative_ls_error, WithinAbs(d.relative_ls_error, 1e-12));
}
