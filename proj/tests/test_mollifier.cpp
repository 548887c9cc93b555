#include <cmath>
#include <random>

#include "doctest.h"
#include "superpos/lfunction.hpp"
#include "superpos/mollifier.hpp"
#include "superpos/specialfn.hpp"

using namespace superpos;

TEST_CASE("mollifier parameters") {
  const auto prm = MollifierParams::standard();
  CHECK_NOTHROW(prm.validate());
  CHECK(prm.P(prm.upsilon) == doctest::Approx(1).epsilon(1e-15));
  CHECK(std::abs(prm.P_prime(prm.upsilon)) < 1e-14);
  CHECK(prm.P(0) == 0);
  CHECK(prm.S() == doctest::Approx(kPi / (4 * 0.36 * (1 - 2e-9))).epsilon(1e-15));
  CHECK(prm.d() == doctest::Approx(2 * prm.S() / 3).epsilon(1e-15));
  CHECK(prm.M(30) == doctest::Approx(std::pow(30.0, 1 - 5e-10)).epsilon(1e-15));
  CHECK(prm.R == 4);
  // Q as an identity and as an expanded polynomial
  const auto q = prm.q_coefficients();
  for (double x = 0; x <= 1.0001; x += 0.05) {
    const double qx = ((q[3] * x + q[2]) * x + q[1]) * x + q[0];
    CHECK(qx == doctest::Approx(prm.Q(x)).epsilon(1e-13));
  }
  CHECK(std::abs(prm.Q(0)) < 1e-15);
  CHECK(prm.Q(1) == doctest::Approx(1 - prm.P(1)).epsilon(1e-15));
  CHECK_NOTHROW(MollifierParams::with(0.5, 1e-3).validate());
  auto bad = prm;
  bad.p[3] *= 1.01;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(MollifierParams::with(1.2, 1e-10), DomainError);
}

TEST_CASE("F cutoff: worked values and knots") {
  const auto prm = MollifierParams::standard();
  const double M = 1000;
  const double knot = std::pow(M, 1 - prm.upsilon);
  CHECK(f_cutoff(knot, prm, M) == 1);
  CHECK(f_cutoff(knot * (1 + 1e-9), prm, M) == doctest::Approx(1).epsilon(1e-12));
  CHECK(f_cutoff(M, prm, M) == 0);
  CHECK(f_cutoff(M * (1 - 1e-9), prm, M) < 1e-12);
  CHECK(f_cutoff(std::pow(M, 1 - prm.upsilon / 2), prm, M) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(f_cutoff(0, prm, M) == 1);
  double prev = 1;
  for (double x = 1; x <= M; x *= 1.07) {
    const double v = f_cutoff(x, prm, M);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK_THROWS_AS(f_cutoff(1, prm, 10), DomainError);
}

TEST_CASE("F cutoff: P-part plus Q-part reconstruction") {
  const auto prm = MollifierParams::standard();
  for (double M : {30.0, 1e3, 1e6}) {
    for (double x = 1; x <= 1.5 * M; x *= 1.013) {
      const auto s = f_cutoff_split(x, prm, M);
      CHECK(s.p_part + s.q_part == doctest::Approx(f_cutoff(x, prm, M)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mollifier coefficients x_l(s)") {
  const auto prm = MollifierParams::standard();
  const double M = prm.M(30);
  const cplx s(0.6, 1.3);
  CHECK(mollifier_coefficient(4, s, prm, M) == 0.0);
  CHECK(mollifier_coefficient(12, s, prm, M) == 0.0);
  CHECK(mollifier_coefficient(31, s, prm, M) == 0.0);
  // x_1 written out: squarefree n < M
  const ArithmeticTable tab(40);
  cplx x1 = 0;
  for (int n = 1; n < M; ++n)
    if (tab.mu(n) != 0) x1 += f_cutoff(n, prm, M) * std::pow(double(n), -2.0 * s);
  CHECK(std::abs(mollifier_coefficient(1, s, prm, M) - x1) < 1e-14);
  // mu(l) enters as a sign
  CHECK(mollifier_coefficient(2, 1.0, prm, M).real() < 0);
  CHECK(mollifier_coefficient(6, 1.0, prm, M).real() > 0);
}

TEST_CASE("inverse coefficients c(n)") {
  const auto prm = MollifierParams::standard();
  const double M = 1e4;
  const double knot = std::pow(M, 1 - prm.upsilon);
  CHECK(inverse_coefficient(1, prm, M) == 1);
  for (int n = 2; n <= knot; ++n) CHECK(inverse_coefficient(n, prm, M) == 0);
  const ArithmeticTable tab(3000);
  for (int n = 1; n <= 3000; ++n) CHECK(std::abs(inverse_coefficient(n, prm, M)) <= tab.tau(n) + 1e-12);
}

TEST_CASE("L M coefficients collapse to lambda(n) c(n)") {
  const auto prm = MollifierParams::standard();
  for (int k : {12, 22, 34}) {
    for (const auto& f : hecke_basis(k, 800)) {
      const double M = prm.M(30);
      const auto b = lm_coefficients(f, prm, M, 800);
      double worst = 0;
      for (int n = 1; n <= 800; ++n)
        worst = std::max(worst, std::abs(b[n] - f.lambda[n] * inverse_coefficient(n, prm, M)));
      CHECK(worst < 1e-12);
      CHECK(b[1] == doctest::Approx(1));
      // a_f of 1/L: cube-free support, a(m k^2) = mu(m) lambda(m)
      CHECK(inverse_l_coefficient(f, 8) == 0);
      CHECK(inverse_l_coefficient(f, 12) == doctest::Approx(-f.lambda[3]));
      CHECK(inverse_l_coefficient(f, 30) == doctest::Approx(-f.lambda[30]));
    }
  }
}

TEST_CASE("mollifier value: two representations, and L M near 1") {
  const auto prm = MollifierParams::standard();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> us(0.5, 2.0), ut(-20, 20);
  for (int k = 12; k <= 40; k += 2) {
    if (dim_cusp_forms(k) == 0) continue;
    for (const auto& f : hecke_basis(k, 400)) {
      for (int i = 0; i < 10; ++i) {
        const cplx s(us(rng), ut(rng));
        const auto v = mollifier_value(f, s, 30, prm);
        CHECK(v.agreement < 1e-10);
      }
    }
  }
  for (int k : {12, 34, 38, 58}) {
    const auto f = hecke_basis(k, 400)[0];
    const CompletedLFunction L(f);
    const auto v = mollifier_value(f, 1.6, 30, prm);
    const cplx lm = L.l_value(1.6) * v.by_radical;
    CAPTURE(k);
    CHECK(std::abs(lm - 1.0) < 0.2);
    // against the Dirichlet series sum lambda(n) c(n) n^{-3}, which is absolutely convergent there
    const auto b = lm_coefficients(f, prm, v.M, 400);
    cplx series = 0;
    for (int n = 1; n <= 400; ++n) series += b[n] * std::pow(double(n), -3.0);
    CHECK(std::abs(series - L.l_value(3.0) * mollifier_value(f, 3.0, 30, prm).by_radical) < 1e-6);
  }
  CHECK_THROWS_AS(mollifier_value(hecke_basis(12, 20)[0], 1.0, 30, prm), InsufficientCoefficients);
  CHECK_THROWS_AS(mollifier_value(hecke_basis(12, 400)[0], 1.0, 8, prm), DomainError);
}

TEST_CASE("twisted moment main terms: worked values") {
  const auto& phi = SmoothBump::standard();
  const double K = 30;
  const auto m = twisted_moment_main(1, 0.1, 0, K, phi);
  CHECK(m.term1 == doctest::Approx(zeta(cplx(1.2, 0)).real() * (K / 4) * phi.integral()).epsilon(1e-13));
  CHECK(m.term1 + m.term2 == doctest::Approx(m.merged12).epsilon(1e-12));
  // the l-dependence of the first term
  const auto a1 = twisted_moment_main(1, 0.05, 0.5, K), a6 = twisted_moment_main(6, 0.05, 0.5, K);
  CHECK(a6.term1 / a1.term1 == doctest::Approx(eta(cplx(0, 0.5), 6).real() / std::pow(6.0, 0.55)).epsilon(1e-13));
  // term3 written out at t != 0 with the zeta value itself
  const double t = 0.4, d = 0.03;
  const auto b = twisted_moment_main(3, d, t, K);
  const cplx X = K / (4 * kPi);
  const cplx I = integrate([&](double u) { return phi(u) * std::exp(cplx(-2 * d, 2 * t) * std::log(u)); }, 1.0, 2.0,
                           1e-13).value;
  const cplx inner = zeta(cplx(1, 2 * t)) * eta(cplx(d, 0), 3) * std::pow(3.0, cplx(-0.5, -t)) *
                     std::pow(X, cplx(-2 * d, 2 * t)) * (K / 4) * I;
  CHECK(b.term3 == doctest::Approx(-2 * inner.real()).epsilon(1e-11));
}

TEST_CASE("twisted moment main terms: removable singularities") {
  const double K = 30;
  // delta across 0: two-sided agreement, and the approach to the limit is linear
  const auto p = twisted_moment_main(1, 1e-5, 0.5, K), n = twisted_moment_main(1, -1e-5, 0.5, K);
  const auto z = twisted_moment_main(1, 0, 0.5, K), far = twisted_moment_main(1, 1e-3, 0.5, K);
  CHECK(std::isfinite(z.total));
  CHECK(std::abs(p.total - n.total) < 1e-4 * std::abs(z.total));
  CHECK(std::abs(p.total - z.total) < 0.02 * std::abs(far.total - z.total));
  CHECK(std::isinf(z.term1));
  // t across 0
  const auto t0 = twisted_moment_main(3, 0.02, 0, K), t1 = twisted_moment_main(3, 0.02, 1e-6, K);
  CHECK(std::isfinite(t0.term3));
  CHECK(t1.total == doctest::Approx(t0.total).epsilon(1e-8));
  const auto tm = twisted_moment_main(3, 0.02, -1e-3, K), tp = twisted_moment_main(3, 0.02, 1e-3, K);
  CHECK(tm.total == doctest::Approx(tp.total).epsilon(1e-12));  // even in t
}

TEST_CASE("twisted moment main terms: domain") {
  CHECK_THROWS_AS(twisted_moment_main(1, 0.6, 0, 30), DomainError);
  CHECK_THROWS_AS(twisted_moment_main(1, -0.5, 0, 30), DomainError);
  CHECK_THROWS_AS(twisted_moment_main(1, 0.1, 2, 30), DomainError);
  CHECK_THROWS_AS(twisted_moment_main(2000, 0.1, 0, 30), DomainError);
  CHECK_THROWS_AS(twisted_moment_lhs(1, 0.02, 0, 50), DomainError);
}

TEST_CASE("twisted moment: family sum against the main terms") {
  const auto m30 = twisted_moment(1, 0.02, 0, 30);
  CHECK(m30.ratio >= 0.7);
  CHECK(m30.ratio <= 1.3);
  const auto m20 = twisted_moment(1, 0.02, 0, 20), m40 = twisted_moment(1, 0.02, 0, 40);
  CHECK(std::abs(m40.ratio - 1) < std::abs(m20.ratio - 1));
  // l = 2 against l = 1 follows the full main term, whose three pieces depend on l differently
  const auto l2 = twisted_moment(2, 0.02, 0, 40);
  const double expect = l2.main.total / m40.main.total;
  CHECK(l2.lhs / m40.lhs == doctest::Approx(expect).epsilon(0.2));
  CHECK(l2.lhs / m40.lhs == doctest::Approx(expect).epsilon(1e-2));
  const auto t5 = twisted_moment(1, 0.05, 0.5, 30);
  CHECK(t5.ratio == doctest::Approx(1).epsilon(0.05));
}

TEST_CASE("omega regions") {
  const double K = 1e6;  // log K = 13.8, log log K = 2.63
  CHECK(classify_omega(0.05, 0.05, K) == OmegaCase::one);
  CHECK(classify_omega(0.01, 0.1, K) == OmegaCase::two);
  CHECK(classify_omega(0.1, 0.01, K) == OmegaCase::three);
  CHECK(classify_omega(0.5, 0.5, K) == OmegaCase::none);
  CHECK_NOTHROW(require_case_one(0.05, 0.05, K));
  CHECK_THROWS_WITH_AS(require_case_one(0.01, 0.1, K), doctest::Contains("out of scope"), DomainError);
  CHECK_THROWS_AS(require_case_one(0.1, 0.01, K), DomainError);
  CHECK_THROWS_AS(require_case_one(0.5, 0.5, K), DomainError);
}

TEST_CASE("Euler product T: double sum against the closed form") {
  for (int r : {1, 6}) {
    const auto e = euler_product_T(0.1, 0.1, 1.5, r, 0.1);
    CAPTURE(r);
    CHECK(e.residual <= e.sum_tail + e.closed_tail + 1e-12);
    CHECK(e.sum_tail < 1e-6);
  }
  CHECK(euler_product_T(0.1, 0.1, 1.5, 6, 0.1).closed_form.real() > 0);  // mu(6) = +1
  CHECK(euler_product_T(0.1, 0.1, 1.5, 5, 0.1).closed_form.real() < 0);
  const auto e4 = euler_product_T(0.1, 0.1, 1.5, 4, 0.1);
  CHECK(e4.double_sum == 0.0);
  CHECK(e4.closed_form == 0.0);
  // complex shifts, including (alpha, beta) = (omega, conj omega)
  const cplx w(0.05, 0.3);
  const auto ec = euler_product_T(w, std::conj(w), cplx(1.2, 0.7), 5, w, 1 << 19);
  CHECK(ec.residual <= ec.sum_tail + ec.closed_tail + 1e-12);
  const auto en = euler_product_T(-w, std::conj(w), cplx(1.4, -2), 1, std::conj(w), 1 << 19);
  CHECK(en.residual <= en.sum_tail + en.closed_tail + 1e-12);
  CHECK_THROWS_AS(euler_product_T(0.1, 0.1, -0.3, 1, 0.1), DomainError);
}
