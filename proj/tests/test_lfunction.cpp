#include <cmath>

#include "doctest.h"
#include "superpos/lfunction.hpp"
#include "superpos/specialfn.hpp"

using namespace superpos;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

const CompletedLFunction& delta_l() {
  static const CompletedLFunction L = make_lfunction(12, 0, 1000);
  return L;
}

}  // namespace

TEST_CASE("functional equation and central values") {
  const auto& L = delta_l();
  const cplx s(0.73, 0.4);
  CHECK(std::abs(L.lambda(s) - L.lambda(1.0 - s)) < 1e-10 * std::abs(L.lambda(s)));
  CHECK(L.epsilon() == 1);
  const auto L18 = make_lfunction(18);
  CHECK(L18.epsilon() == -1);
  CHECK(std::abs(L18.lambda(0.5)) < 1e-12);
  // Lambda(1/2, Delta) > 0
  CHECK(L.lambda(0.5).real() > 0);
}

TEST_CASE("functional equation grid, reality on the critical line") {
  for (int k = 12; k <= 60; k += 2) {
    if (dim_cusp_forms(k) == 0) continue;
    for (const auto& f : hecke_basis(k, 400)) {
      const CompletedLFunction L(f);
      double worst = 0;
      for (double x : {0.2, 0.35, 0.5, 0.65, 0.8})
        for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
          const cplx s(x, t);
          const cplx a = L.lambda(s);
          worst = std::max(worst, std::abs(a - double(L.epsilon()) * L.lambda(1.0 - s)) / std::max(1.0, std::abs(a)));
        }
      CHECK(worst < 1e-10);
      double wrong = 0;
      for (double t : {0.3, 1.7, 6.0, 14.0, 33.0}) {
        const cplx v = L.lambda(cplx(0.5, t));
        wrong = std::max(wrong, std::abs(L.epsilon() > 0 ? v.imag() : v.real()) / std::abs(v));
      }
      CHECK(wrong < 1e-10);
    }
  }
}

TEST_CASE("rotated split agrees across rotation budgets") {
  for (int k : {12, 26, 130}) {
    const auto f = hecke_basis(k, 1000)[0];
    const CompletedLFunction a(f), b(f, 1e-16, 3.0);
    for (double t : {10.0, 25.0, 49.0})
      for (double x : {0.5, -3.0, 4.0}) CHECK(rel(a.lambda(cplx(x, t)), b.lambda(cplx(x, t))) < 1e-11);
  }
}

TEST_CASE("Dirichlet series and Euler product in the half-plane of convergence") {
  const auto& L = delta_l();
  const auto& lam = L.form().lambda;
  // L(6+40i): the Dirichlet series tail past n = 1000 is below 1e-14
  const cplx s(6, 40);
  CompensatedSum<cplx> ds;
  for (int n = 1; n <= 1000; ++n) ds.add(lam[n] * std::exp(-s * std::log(double(n))));
  CHECK(rel(L.l_value(s), ds.value()) < 1e-12);
  // Euler product at s = 2 over p <= 100
  ArithmeticTable tab(100);
  double prod = 1;
  for (int p : tab.primes()) prod /= 1 - lam[p] * std::pow(p, -2.0) + std::pow(p, -4.0);
  const double l2 = L.l_value(2.0).real();
  CHECK(std::abs(l2 / prod - 1) < 1e-4);
  CHECK(std::abs(L.l_value(2.0).imag()) < 1e-15);
  // gamma factor normalization
  CHECK(rel(L.gamma_factor(2.0), superpos::gamma(7.5) * std::pow(2 * kPi, -7.5)) < 1e-13);
}

TEST_CASE("insufficient coefficients are reported") {
  auto f = hecke_basis(40, 400)[0];
  f.lambda.resize(6);
  const CompletedLFunction L(f);
  try {
    L.lambda(0.5);
    FAIL("expected InsufficientCoefficients");
  } catch (const InsufficientCoefficients& e) {
    CHECK(e.required > 5);
    CHECK(e.required == L.required_terms(0.5));
  }
  CHECK_THROWS_AS(L.lambda(cplx(0.5, 60)), DomainError);
}

TEST_CASE("derivatives: parity at the center") {
  for (int k : {12, 16, 18, 20, 22, 26, 40, 98}) {
    const auto L = make_lfunction(k);
    const auto D = lambda_derivatives(L, 0.5, 24);
    const int forced = L.epsilon() > 0 ? 1 : 0;  // parity that must vanish
    for (int j = 0; j <= 24; ++j) {
      CHECK(std::abs(D.value[j].imag()) <= 1e-12 * std::abs(D.value[j]) + D.noise[j] * 10);
      if (j % 2 != forced) continue;
      double nb = 0;
      if (j > 0) nb = std::max(nb, std::abs(D.value[j - 1]));
      if (j < 24) nb = std::max(nb, std::abs(D.value[j + 1]));
      CHECK(std::abs(D.value[j]) < 1e-12 * nb);
    }
  }
}

TEST_CASE("derivatives: finite differences and Taylor reconstruction") {
  const auto& L = delta_l();
  const auto D3 = lambda_derivatives(L, 3.0, 2);
  const double h = 1e-5;
  const cplx fd = (L.lambda(3 + h) - L.lambda(3 - h)) / (2 * h);
  CHECK(rel(D3.value[1], fd) < 1e-6);
  const cplx fd2 = (L.lambda(3 + 1e-3) - 2.0 * L.lambda(3) + L.lambda(3 - 1e-3)) / 1e-6;
  CHECK(rel(D3.value[2], fd2) < 1e-5);
  for (int k : {12, 22, 60}) {
    const auto Lk = make_lfunction(k);
    const auto D = lambda_derivatives(Lk, 0.75, 24);
    CompensatedSum<cplx> taylor;
    double term = 1;
    for (int j = 0; j <= 24; ++j) {
      taylor.add(D.value[j] * term);
      term *= 0.05 / (j + 1);
    }
    CHECK(rel(taylor.value(), Lk.lambda(0.80)) < 1e-9);
  }
}

TEST_CASE("derivative orders are validated") {
  const auto& L = delta_l();
  CHECK_THROWS_AS(lambda_derivatives(L, 0.5, 25), DomainError);
  CHECK_THROWS_AS(lambda_derivatives(L, 0.5, 10, 16), DomainError);
}

TEST_CASE("AFE weight: leading terms and decay") {
  const AfeWeight V0(40, 0.0, 0.0);
  // both residues at s = 0 contribute 1 when delta = 0, so V -> 2
  CHECK(std::abs(V0(1.0) - 2) < 1e-3);
  CHECK(V0.leading_terms(1.0) == doctest::Approx(2.0));
  const AfeWeight V1(40, 0.01, 0.0);
  CHECK(std::abs(V1(1.0) - V1.leading_terms(1.0)) < 1e-3);
  CHECK(std::abs(V1(100.0 * 1600)) < 1e-6);
  double im = 0;
  V1.value(37.0, &im);
  CHECK(im < 1e-9);
  // y V'(y) bounded on a log grid over [1, 10 k^2]
  double worst = 0;
  for (double ly = 0; ly <= std::log(16000.0); ly += 0.05) worst = std::max(worst, std::abs(V1.y_derivative(std::exp(ly))));
  CHECK(worst <= 5);
  CHECK(worst == doctest::Approx(1.57712).epsilon(1e-4));
  for (double y : {2.0, 9.5, 140.0}) {
    const double h = 1e-4;
    const double fd = (V1(y * std::exp(h)) - V1(y * std::exp(-h))) / (2 * h);
    CHECK(std::abs(V1.y_derivative(y) - fd) < 1e-7);
  }
}

TEST_CASE("AFE weight: line route against the real-space route") {
  struct P {
    int k;
    double delta, t, y;
  };
  for (const P& p : {P{12, 0.02, 0, 1}, P{12, 0.02, 0, 7.5}, P{16, 0, 0.3, 3}, P{40, 0.01, 0, 10},
                     P{40, -0.3, 2, 25}, P{60, 0.005, 1, 60}}) {
    const double a = AfeWeight(p.k, p.delta, p.t)(p.y);
    const double b = afe_weight_real_space(p.k, p.delta, p.t, p.y);
    CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(b)));
  }
  CHECK_THROWS_AS(AfeWeight(40, 0.3, 0), DomainError);
  CHECK_THROWS_AS(AfeWeight(40, 0, 41), DomainError);
}

TEST_CASE("AFE sum against the direct evaluator") {
  struct P {
    int k;
    double delta, t;
  };
  for (const P& p : {P{12, 0.02, 0}, P{16, 0, 0.3}}) {
    const auto f = hecke_basis(p.k, 1000)[0];
    const CompletedLFunction L(f);
    const auto S = l_squared_afe(f, p.delta, p.t);
    const double direct = std::norm(L.l_value(cplx(0.5 + p.delta, p.t)));
    CHECK(std::abs(S.value - direct) < 1e-6 * direct);
    CHECK(S.value >= 0);
    CHECK(S.y_max <= 40 * p.k * p.k);
  }
  // an odd form: the central value vanishes, the sum must follow
  const auto f18 = hecke_basis(18, 1000)[0];
  CHECK(std::abs(l_squared_afe(f18, 0, 0).value) < 1e-12);
  auto short_f = f18;
  short_f.lambda.resize(5);
  CHECK_THROWS_AS(l_squared_afe(short_f, 0.01, 0), InsufficientCoefficients);
}
