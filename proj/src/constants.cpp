#include "superpos/constants.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace superpos {

namespace {

constexpr double kMergeBelow = 1e-4;
const cplx kI(0, 1);

// Everything V needs about P and Q, with a = 1 - 5 theta.
struct Shape {
  const MollifierParams& prm;
  double a, ups;
  double P(double x) const { return prm.P(x); }
  double P1(double x) const { return prm.P_prime(x); }
  double P2(double x) const { return 6 * prm.p[3] * x + 2 * prm.p[2]; }
  double P3() const { return 6 * prm.p[3]; }
  // sum_{j >= 2} P^{(j)}(0) / z^j, z = -2 w a; only j = 2, 3 survive for a cubic
  cplx Sp(cplx w) const {
    const cplx z = -2.0 * w * a;
    return 2 * prm.p[2] / (z * z) + 6 * prm.p[3] / (z * z * z);
  }
  cplx Sq(cplx w) const {
    const auto q = prm.q_coefficients();
    const cplx z = -2.0 * w * a * (1 - ups);
    return 2 * q[2] / (z * z) + 6 * q[3] / (z * z * z);
  }
};

template <class F>
auto xint(F f, double upsilon, double tol) {
  QuadOptions o;
  o.rel_tol = tol;
  o.abs_tol = 0;
  return integrate(f, 0.0, upsilon, o).value;
}

// The complex brackets: V2 = e^{-4u}[... + 2 Re Z2 + ...], V3 = -2 Re Z3, V32 = -2 Re Z32.
struct Brackets {
  cplx z2, z3, z31, z32;
};

struct Raw {
  ScriptV v;
  Brackets b;
};

Raw evaluate(double u, double v, const MollifierParams& prm, VForm form, double tol) {
  if (!(std::abs(u) <= 500 && std::abs(v) <= 300)) throw DomainError("script_v: need |u| <= 500, |v| <= 300");
  if (u == 0 && v == 0) throw DomainError("script_v: u + iv = 0 is a genuine singularity");
  const Shape sh{prm, 1 - 5 * prm.theta, prm.upsilon};
  const double a = sh.a, ups = sh.ups;
  const cplx w(u, v), wc(u, -v);
  auto E = [&](double x) { return std::exp(-2 * u * (1 - x) * a); };
  const double P3 = sh.P3();
  // B multiplies P', P'', P''' in V2; C likewise in V3
  auto B = [&](double x) {
    return kI * v / w * sh.P1(x) + u / (2.0 * w * w * a) * sh.P2(x) - u / (4.0 * w * w * w * a * a) * P3;
  };
  auto C = [&](double x) {
    return u / w * sh.P1(x) + kI * v / (2.0 * w * w * a) * sh.P2(x) - kI * v / (4.0 * w * w * w * a * a) * P3;
  };
  auto G = [&](double x) { return -2.0 * kI * v * a * sh.P(x) + sh.P1(x); };

  const bool mu = form == VForm::merged || (form == VForm::automatic && std::abs(u) < kMergeBelow);
  const bool mv = form == VForm::merged || (form == VForm::automatic && std::abs(v) < kMergeBelow);

  Raw r;
  r.v.merged_u = mu;
  r.v.merged_v = mv;

  const double I1 = xint([&](double x) { return E(x) * sh.P1(x) * sh.P1(x); }, ups, tol);
  const cplx Spw = sh.Sp(w), Sqw = sh.Sq(w);
  const double e4 = std::exp(-4 * u);

  // ---- V1 and the first integral of V2
  double v1m1 = 0, v2a = 0;
  if (!mu) {
    v1m1 = I1 / (2 * u * a);
    const double I2 = xint([&](double x) { return E(x) * std::norm(B(x)); }, ups, tol);
    v2a = -e4 * I2 / (2 * u * a);
  } else {
    // (P'^2 - e^{-4u}|B|^2)/u written without the 0/0; B = (iv P' + u D)/w
    const double em = u == 0 ? 4.0 : -std::expm1(-4 * u) / u;
    const double n2 = u * u + v * v;
    const double I12 = xint(
        [&](double x) {
          const double p1 = sh.P1(x);
          const cplx D = sh.P2(x) / (2.0 * w * a) - P3 / (4.0 * w * w * a * a);
          const double Fu = (u * p1 * p1 + v * v * p1 * p1 * em - e4 * (2 * v * p1 * D.imag() + u * std::norm(D))) / n2;
          return E(x) * Fu;
        },
        ups, tol);
    v1m1 = I12 / (2 * a);
  }

  // ---- rest of V2
  const cplx I3 = xint([&](double x) { return std::exp(-2.0 * kI * v * (1 - x) * a) * B(x); }, ups, tol);
  r.b.z2 = std::exp(-2.0 * a * wc) * sh.Sp(wc) * I3;
  // e^{-4u}(A - e^{2ua})|X|^2 and e^{-4u}(1 - A)|X + Y|^2 with A = e^{2ua(1-ups)},
  // X = e^{-2wa} Sp(w), Y = e^{-2wa(1-ups)} Sq(w); exponents combined before exp
  const cplx X = std::exp(-2.0 * w * a) * Spw, Y = std::exp(-2.0 * w * a * (1 - ups)) * Sqw;
  const double lA = 2 * u * a * (1 - ups);
  const double t3 = (std::exp(-4 * u + lA - 4 * u * a) - std::exp(-4 * u + 2 * u * a - 4 * u * a)) * std::norm(Spw);
  const double t4 = -std::expm1(lA) * e4 * std::norm(X + Y);
  const double v2rest = e4 * 2 * r.b.z2.real() + t3 + t4;

  // ---- V3 and its split
  const cplx e2w = std::exp(-2.0 * w);
  const cplx I5 = xint([&](double x) { return std::exp(2.0 * kI * v * (1 - x) * a) * G(x); }, ups, tol);
  const cplx edge = (1.0 - std::exp(2.0 * kI * v * (1 - ups) * a)) * (X + Y);
  const cplx I6 = xint([&](double x) { return E(x) * sh.P(x) * C(x); }, ups, tol);
  const cplx I7 = xint(
      [&](double x) {
        return E(x) * sh.P1(x) * (sh.P2(x) / (2.0 * w * w * a) - P3 / (4.0 * w * w * w * a * a));
      },
      ups, tol);
  r.b.z32 = e2w * (I6 - I7 / (2 * a) + X * I5 + edge);
  r.v.v32 = -2 * r.b.z32.real();
  if (!mv) {
    r.b.z31 = e2w * u / (-2.0 * kI * v * w * a) * I1;
    r.v.v31 = -2 * r.b.z31.real();
    const cplx I4 = xint([&](double x) { return E(x) * G(x) * C(x); }, ups, tol);
    r.b.z3 = e2w * (I4 / (-2.0 * kI * v * a) + X * I5 + edge);
    r.v.v3 = -2 * r.b.z3.real();
  } else {
    // Re{e^{-2iv} i/(v w)} = (u sin(2v)/v + cos 2v)/|w|^2, finite at v = 0
    const double sinc = v == 0 ? 2.0 : std::sin(2 * v) / v;
    r.v.v31 = -u * I1 * std::exp(-2 * u) * (u * sinc + std::cos(2 * v)) / (a * std::norm(w));
    r.b.z31 = r.v.v31 / -2.0;
    r.b.z3 = r.b.z31 + r.b.z32;
    r.v.v3 = r.v.v31 + r.v.v32;
  }

  if (mu) {
    r.v.v1 = 1 + v1m1;
    r.v.v2 = v2rest;
  } else {
    r.v.v1 = 1 + v1m1;
    r.v.v2 = v2a + v2rest;
  }
  r.v.minus_one = v1m1 + r.v.v2 + r.v.v3;
  r.v.value = 1 + r.v.minus_one;
  if (!std::isfinite(r.v.value) || !std::isfinite(r.v.v31) || !std::isfinite(r.v.v32)) {
    std::ostringstream os;
    os << "script_v: V(" << u << ", " << v << ") is not representable";
    throw NumericError(os.str());
  }
  return r;
}

}  // namespace

ScriptV script_v(double u, double v, const MollifierParams& prm, VForm form) {
  return evaluate(u, v, prm, form, 1e-13).v;
}

double script_v_conjugate_residue(double u, double v, const MollifierParams& prm) {
  const auto p = evaluate(u, v, prm, VForm::automatic, 1e-13).b;
  const auto m = evaluate(u, -v, prm, VForm::automatic, 1e-13).b;
  double worst = 0;
  auto check = [&](cplx x, cplx y) {
    worst = std::max(worst, std::abs((x + y).imag()) / std::max(1.0, std::abs(x)));
  };
  check(p.z2, m.z2);
  check(p.z3, m.z3);
  check(p.z31, m.z31);
  check(p.z32, m.z32);
  return worst;
}

LemmaScan lemma_vl_scan(const MollifierParams& prm, int nu, int nv, double u0, double u1) {
  if (nu < 1 || nv < 2) throw DomainError("lemma_vl_scan: need nu >= 1 and nv >= 2");
  if (!(u0 >= 10 && u1 <= 60 && u0 <= u1)) throw DomainError("lemma_vl_scan: need 10 <= u0 <= u1 <= 60");
  LemmaScan s;
  s.worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nu; ++i) {
    const double u = nu == 1 ? u0 : u0 + (u1 - u0) * i / (nu - 1);
    for (int k = 0; k < nv; ++k) {
      const double v = -5 * u + 10 * u * k / (nv - 1);
      const auto V = script_v(u, v, prm);
      ++s.points;
      auto consider = [&](double value, double bound, const char* name) {
        const double slack = (bound - value) / bound;
        if (slack < 0) ++s.violations;
        if (slack < s.worst_slack) {
          s.worst_slack = slack;
          s.worst_u = u;
          s.worst_v = v;
          s.worst_inequality = name;
        }
      };
      consider(V.minus_one, std::exp(-u / 2), "V <= 1 + e^{-u/2}");
      consider(V.v1 - 1, std::exp(-u / 2) / 2, "V1 <= 1 + e^{-u/2}/2");
      consider(V.v2, std::exp(-4 * u), "V2 <= e^{-4u}");
      consider(V.v3, std::exp(-2 * u), "V3 <= e^{-2u}");
      consider(std::abs(V.v31), std::exp(-2 * u) / 2, "|V31| <= e^{-2u}/2");
      consider(std::abs(V.v32), std::exp(-2 * u) / 2, "|V32| <= e^{-2u}/2");
    }
  }
  return s;
}

namespace {

double log_v(double u, double v, const MollifierParams& prm, double tol) {
  return std::log1p(evaluate(u, v, prm, VForm::automatic, tol).v.minus_one);
}

// int_0^T cos(pi t/(2T)) log V(u0, t) dt + int_0^inf sinh(c u) log V(u0 + u, T) du,
// c = pi/(2T). The u integrand decays like u^{-4} when c matches the decay rate of
// V1 - 1 and exponentially otherwise; past U it is modeled from its value at U.
BoundValue bracket(double u0, double T, double prefactor, const MollifierParams& prm, const ConstantsOptions& opt) {
  if (!(opt.tol > 0 && opt.inner_tol > 0 && opt.cutoff >= 50 && opt.cutoff <= 450))
    throw DomainError("constants: need positive tolerances and 50 <= cutoff <= 450");
  const double c = kPi / (2 * T);
  QuadOptions o;
  o.rel_tol = opt.tol;
  o.abs_tol = 0;
  o.max_panels = 100000;
  const auto ti = integrate([&](double t) { return std::cos(c * t) * log_v(u0, t, prm, opt.inner_tol); }, 0.0, T, o);
  auto fu = [&](double u) { return std::sinh(c * u) * log_v(u0 + u, T, prm, opt.inner_tol); };
  // graded panels, fine near the start where log V changes fastest
  o.initial_panels = 64;
  const double U = opt.cutoff;
  const auto ui = integrate(fu, 0.0, U, o);
  // fit C u^{-p} on [U/2, U]; p >= 4 means the integrand is at most polynomially decaying
  const double fU = fu(U), fH = fu(U / 2);
  double tail = 0;
  if (fU != 0 && fH != 0 && (fU > 0) == (fH > 0)) {
    const double p = std::log(fH / fU) / std::log(2.0);
    tail = p > 1 ? fU * U / (p - 1) : std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(tail)) throw QuadratureFailure("constants: u integrand does not decay past the cutoff", 0.0, 0.0);
  BoundValue b;
  b.t_integral = ti.value;
  b.u_integral = ui.value + tail;
  b.tail = tail / prefactor;
  b.error_estimate = (ti.error_estimate + ui.error_estimate + std::abs(tail)) / prefactor;
  b.value = (b.t_integral + b.u_integral) / prefactor;
  return b;
}

}  // namespace

BoundValue n0_bound(const MollifierParams& prm, const ConstantsOptions& opt) {
  prm.validate();
  const double S = prm.S(), R = prm.R;
  auto b = bracket(-R, S, 8 * S * std::sinh(kPi * R / (2 * S)), prm, opt);
  b.value -= 0.5;
  return b;
}

BoundValue nj_bound(int j, const MollifierParams& prm, const ConstantsOptions& opt) {
  if (j < 1 || j > 40) throw DomainError("nj_bound: need 1 <= j <= 40");
  prm.validate();
  const double d = prm.d();
  const double H = 1.5 * (j + 1) * d;
  return bracket(j * d / 2, H, 6 * (j + 1) * d * std::sinh(kPi * j / (6.0 * (j + 1))), prm, opt);
}

double closed_form_tail(const MollifierParams& prm) {
  const double d = prm.d();
  return 0.6 * std::exp(-14 * d / 4) / -std::expm1(-d / 4);
}

ConstantsReport tail_and_total(const MollifierParams& prm, const ConstantsOptions& opt) {
  ConstantsReport r;
  auto n0 = std::async(std::launch::async, [&] { return n0_bound(prm, opt); });
  std::vector<std::future<BoundValue>> nj;
  for (int j = 1; j <= 13; ++j) nj.push_back(std::async(std::launch::async, [&, j] { return nj_bound(j, prm, opt); }));
  r.n0 = n0.get();
  CompensatedSum<> total, err;
  total.add(r.n0.value);
  err.add(r.n0.error_estimate);
  for (int j = 1; j <= 13; ++j) {
    r.nj.push_back(nj[j - 1].get());
    total.add(r.nj.back().value);
    err.add(r.nj.back().error_estimate);
    if (j >= 4) r.sum_4_13 += r.nj.back().value;
  }
  r.tail = closed_form_tail(prm);
  total.add(r.tail);
  r.total = total.value();
  r.proportion = 1 - r.total;
  r.error_estimate = err.value();
  return r;
}

}  // namespace superpos
