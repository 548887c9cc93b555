#include <cmath>
#include <random>

#include "doctest.h"
#include "superpos/numerics.hpp"

using namespace superpos;

TEST_CASE("integrate: elementary integrals") {
  auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(r.error_estimate >= 0);
  CHECK(r.panels_used >= 1);

  const double U = 0.64;
  auto dP = [U](double x) {
    const double y = x / U;
    return 6 * y / U * (1 - y);
  };
  auto r2 = integrate([&](double x) { return dP(x) * dP(x); }, 0.0, U);
  CHECK(r2.value == doctest::Approx(6 / (5 * U)).epsilon(1e-13));
  CHECK(r2.value == doctest::Approx(1.875).epsilon(1e-13));

  const double S = 2.2;
  auto r3 = integrate([S](double t) { return std::cos(kPi * t / (2 * S)); }, -S, S);
  CHECK(r3.value == doctest::Approx(4 * S / kPi).epsilon(1e-13));
}

TEST_CASE("integrate: polynomials of degree <= 10 are exact") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    double c[11];
    for (double& ci : c) ci = U(rng);
    auto p = [&](double x) {
      double s = 0;
      for (int j = 10; j >= 0; --j) s = s * x + c[j];
      return s;
    };
    double exact = 0;
    for (int j = 0; j <= 10; ++j) exact += c[j] / (j + 1);
    auto r = integrate(p, 0.0, 1.0);
    CHECK(std::abs(r.value - exact) < 1e-12);
    CHECK(r.panels_used == 1);
  }
}

TEST_CASE("integrate: complex integrand and determinism") {
  auto f = [](double x) { return std::exp(cplx(0, 7) * x) * x; };
  auto a = integrate(f, 0.0, 3.0);
  auto b = integrate(f, 0.0, 3.0);
  const cplx i7(0, 7);
  const cplx exact = (std::exp(i7 * 3.0) * (3.0 / i7 - 1.0 / (i7 * i7))) + 1.0 / (i7 * i7);
  CHECK(std::abs(a.value - exact) < 1e-12);
  CHECK(a.value == b.value);
  CHECK(a.panels_used == b.panels_used);
}

TEST_CASE("integrate: failures are explicit") {
  QuadOptions o;
  o.max_panels = 5;
  o.rel_tol = 1e-14;
  try {
    integrate([](double x) { return std::sin(1 / (x + 1e-6)); }, 0.0, 1.0, o);
    FAIL("expected QuadratureFailure");
  } catch (const QuadratureFailure& e) {
    CHECK(std::isfinite(e.partial_estimate.real()));
    CHECK(e.error_estimate > 0);
  }
  try {
    integrate([](double x) { return x > 0.5 ? NAN : x; }, 0.0, 1.0);
    FAIL("expected NonFiniteIntegrand");
  } catch (const NonFiniteIntegrand& e) {
    CHECK(e.abscissa > 0.5);
  }
}

TEST_CASE("integrate_semiinfinite") {
  auto r = integrate_semiinfinite([](double u) { return std::exp(-u); }, DecayHint::exponential(1));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.tail_bound < 1e-10);

  auto r2 = integrate_semiinfinite([](double u) { return std::sinh(0.3 * u) * std::exp(-u); },
                                   DecayHint::exponential(0.7));
  CHECK(r2.value == doctest::Approx(0.3 / (1 - 0.09)).epsilon(1e-11));

  // polynomial tail with a recorded bound: int_0^inf 1/(1+u)^4 = 1/3
  auto r3 = integrate_semiinfinite([](double u) { return std::pow(1 + u, -4.0); },
                                   DecayHint::polynomial(4));
  CHECK(r3.value == doctest::Approx(1.0 / 3).epsilon(1e-9));
  CHECK(r3.tail_bound > 0);
  CHECK(r3.cutoff >= 400);
  CHECK(r3.error_estimate >= r3.tail_bound);

  // slower decay than claimed: cannot certify the tail within the budget
  DecayHint bad = DecayHint::polynomial(4);
  bad.max_cutoff = 2000;
  CHECK_THROWS_AS(integrate_semiinfinite([](double u) { return 1 / (1 + u * u); }, bad),
                  QuadratureFailure);
}

TEST_CASE("geometric tail closed form against direct summation") {
  const double S = kPi / (4 * 0.36 * (1 - 2e-9));
  const double d = 2 * S / 3;
  CompensatedSum<> direct;
  for (int j = 14; j < 400; ++j) direct.add(0.6 * std::exp(-d * j / 4));
  const double closed = 0.6 * std::exp(-14 * d / 4) / (1 - std::exp(-d / 4));
  CHECK(direct.value() == doctest::Approx(closed).epsilon(1e-13));
  CHECK(closed <= 0.01212);
  CHECK(closed == doctest::Approx(0.012115).epsilon(1e-4));
}

TEST_CASE("winding_number") {
  auto box = Contour::rectangle(0.5, 1.5, -0.5, 0.5);
  auto w1 = winding_number([](cplx s) { return s - 0.8; }, box);
  CHECK(w1.winding == 1);
  CHECK(w1.margin < 1e-9);
  // 1.2 also lies inside the box, so the count is 2 + 1
  auto w2 = winding_number([](cplx s) { return (s - 0.8) * (s - 0.8) * (s - 1.2); }, box);
  CHECK(w2.winding == 3);
  auto w2b = winding_number([](cplx s) { return (s - 0.8) * (s - 0.8) * (s - 1.7); }, box);
  CHECK(w2b.winding == 2);
  auto w0 = winding_number([](cplx s) { return std::exp(s); }, box);
  CHECK(w0.winding == 0);

  // invariance under e^{g} with g(s) = 3s + 1 and under reparameterisation
  auto f = [](cplx s) { return (s - 0.8) * (s - 1.2) * std::exp(3.0 * s + 1.0); };
  CHECK(winding_number(f, box).winding == 2);
  Contour fine;
  for (int i = 0; i < 40; ++i) {
    const double t = i / 40.0;
    fine.vertices.push_back(cplx(0.5 + t, -0.5));
  }
  for (int i = 0; i < 40; ++i) fine.vertices.push_back(cplx(1.5, -0.5 + i / 40.0));
  for (int i = 0; i < 40; ++i) fine.vertices.push_back(cplx(1.5 - i / 40.0, 0.5));
  for (int i = 0; i < 40; ++i) fine.vertices.push_back(cplx(0.5, 0.5 - i / 40.0));
  CHECK(winding_number(f, fine).winding == 2);

  CHECK_THROWS_AS(winding_number([](cplx s) { return s - cplx(1.5, 0.1); }, box),
                  ContourTooCloseToZero);
  CHECK_THROWS_AS(winding_number([](cplx s) { return s - cplx(1.5 + 1e-14, 0.1); }, box),
                  ContourTooCloseToZero);
}

TEST_CASE("SmoothBump basics") {
  auto phi = SmoothBump::standard();
  CHECK(phi(0.5) == 0);
  CHECK(phi(1.0) == 0);
  CHECK(phi(2.0) == 0);
  CHECK(phi(2.5) == 0);
  CHECK(phi(1.5) == doctest::Approx(std::exp(-4.0)));
  for (double x = 1.01; x < 2; x += 0.01) CHECK(phi(x) >= 0);
  // one-sided derivatives flatten toward the endpoints
  for (int n = 1; n <= 4; ++n) {
    CHECK(std::abs(phi.derivative(1.01, n)) < 1e-20);
    CHECK(std::abs(phi.derivative(1.99, n)) < 1e-20);
  }
  // derivative against a finite difference in the interior
  const double h = 1e-5;
  CHECK(phi.derivative(1.3, 1) == doctest::Approx((phi(1.3 + h) - phi(1.3 - h)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("bump_transforms") {
  auto phi = SmoothBump::standard();
  auto [h0, c0] = bump_transforms(phi, 0.0);
  CHECK(h0.real() > 0);
  CHECK(std::abs(h0.imag()) < 1e-18);
  CHECK(phi.integral() == doctest::Approx(h0.real()));
  for (double v : {0.3, 1.7, 4.2}) {
    auto p = phi.hat(v), m = phi.hat(-v);
    CHECK(std::abs(m - std::conj(p)) < 1e-15);
  }
  // Mellin at z=0 is the integral
  CHECK(std::abs(phi.mellin(0.0) - h0) < 1e-15);

  // Rapid decay of the check transform
  const double r = std::abs(phi.check(100)) / std::abs(phi.check(10));
  CHECK(r < 1e-6);
  // check-transform against a direct evaluation in the original variable
  auto direct = integrate(
      [&](double u) -> cplx {
        return phi(std::sqrt(u)) / std::sqrt(2 * kPi * u) * std::polar(1.0, u * 3.0);
      },
      1.0, 4.0, 1e-12);
  CHECK(std::abs(direct.value - phi.check(3.0)) < 1e-13);
}

TEST_CASE("check transform decays at least like v^-3") {
  auto phi = SmoothBump::standard();
  double C = 0;
  for (double v = 10; v <= 200; v *= 1.1) C = std::max(C, v * v * v * std::abs(phi.check(v)));
  CHECK(C > 0);
  // regression pin
  CHECK(C == doctest::Approx(0.0525553589).epsilon(1e-6));
}

TEST_CASE("hat third moment is finite and positive") {
  auto phi = SmoothBump::standard();
  const double m = phi.hat_third_moment();
  CHECK(m > 0);
  CHECK(std::isfinite(m));
  CHECK(phi.hat_third_moment() == m);
  // the cached value against a slow route through the adaptive transform
  QuadOptions o;
  o.rel_tol = 1e-7;
  o.abs_tol = 1e-12;
  o.initial_panels = 256;
  auto slow = integrate([&](double v) { return v * v * v * std::abs(phi.hat(v)); }, 0.0, 128.0, o);
  CHECK(m == doctest::Approx(2 * slow.value).epsilon(1e-6));
}
