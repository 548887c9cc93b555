#include "superpos/mollifier.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "superpos/lfunction.hpp"
#include "superpos/specialfn.hpp"

namespace superpos {

namespace {

// distinct prime factors with exponents, by trial division
std::vector<std::pair<long, int>> factor_small(long n) {
  std::vector<std::pair<long, int>> out;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

int mobius_small(long n) {
  int mu = 1;
  for (const auto& [p, e] : factor_small(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

double lambda_at(const HeckeEigenform& f, long n) {
  if (n > f.max_n()) {
    std::ostringstream os;
    os << "mollifier: needs lambda(n) up to n = " << n << ", form has " << f.max_n();
    throw InsufficientCoefficients(os.str(), static_cast<int>(n));
  }
  return f.lambda[n];
}

// expm1(d c) / d, equal to c at d = 0
double expm1_over(double d, double c) { return d == 0 ? c : std::expm1(d * c) / d; }
// sin(t b) / t, equal to b at t = 0
double sin_over(double t, double b) { return t == 0 ? b : std::sin(t * b) / t; }

double bump_integral(const SmoothBump& phi, const std::function<double(double)>& g) {
  QuadOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-300;
  return integrate([&](double u) { return phi(u) * g(u); }, phi.lo(), phi.hi(), o).value;
}

}  // namespace

// ---- parameters

MollifierParams MollifierParams::standard() { return with(0.64, 1e-10); }

MollifierParams MollifierParams::with(double upsilon, double theta) {
  if (!(upsilon > 0 && upsilon < 1)) throw DomainError("MollifierParams: upsilon must lie in (0, 1)");
  if (!(theta > 0 && theta < 0.01)) throw DomainError("MollifierParams: theta must lie in (0, 1/100)");
  MollifierParams m;
  m.upsilon = upsilon;
  m.theta = theta;
  m.p = {0, 0, 3 / (upsilon * upsilon), -2 / (upsilon * upsilon * upsilon)};
  return m;
}

double MollifierParams::S() const { return kPi / (4 * (1 - upsilon) * (1 - 20 * theta)); }

double MollifierParams::M(double K) const { return std::pow(K, M_exponent()); }

double MollifierParams::P(double x) const { return ((p[3] * x + p[2]) * x + p[1]) * x + p[0]; }

double MollifierParams::P_prime(double x) const { return (3 * p[3] * x + 2 * p[2]) * x + p[1]; }

double MollifierParams::Q(double x) const { return 1 - P(upsilon + (1 - upsilon) * x); }

std::array<double, 4> MollifierParams::q_coefficients() const {
  // P(u + v x) expanded in x, with u = upsilon, v = 1 - upsilon
  const double u = upsilon, v = 1 - upsilon;
  std::array<double, 4> q{};
  q[0] = 1 - P(u);
  q[1] = -P_prime(u) * v;
  q[2] = -(p[2] + 3 * p[3] * u) * v * v;
  q[3] = -p[3] * v * v * v;
  return q;
}

void MollifierParams::validate() const {
  const double tol = 1e-12;
  if (std::abs(P(0)) > tol || std::abs(P_prime(0)) > tol || std::abs(P(upsilon) - 1) > tol ||
      std::abs(P_prime(upsilon)) > tol)
    throw DomainError("MollifierParams: P must satisfy P(0) = P'(0) = P'(upsilon) = 0, P(upsilon) = 1");
}

// ---- F and its relatives

double f_cutoff(double x, const MollifierParams& prm, double M) {
  if (!(M > 10)) throw DomainError("f_cutoff: M must exceed 10");
  if (x < 0) throw DomainError("f_cutoff: x must be nonnegative");
  const double knot = std::pow(M, 1 - prm.upsilon);
  if (x <= knot) return 1;
  if (x >= M) return 0;
  return prm.P(std::log(M / x) / std::log(M));
}

CutoffSplit f_cutoff_split(double x, const MollifierParams& prm, double M) {
  if (!(M > 10)) throw DomainError("f_cutoff_split: M must exceed 10");
  if (!(x > 0)) throw DomainError("f_cutoff_split: x must be positive");
  CutoffSplit s;
  if (x <= M) s.p_part = prm.P(std::log(M / x) / std::log(M));
  const double y = std::pow(M, 1 - prm.upsilon);
  if (x <= y) s.q_part = prm.Q(std::log(y / x) / std::log(y));
  return s;
}

cplx mollifier_coefficient(int ell, cplx s, const MollifierParams& prm, double M) {
  if (ell < 1) throw DomainError("mollifier_coefficient: ell must be positive");
  if (!(M > 10)) throw DomainError("mollifier_coefficient: M must exceed 10");
  const int mu_l = mobius_small(ell);
  if (mu_l == 0 || ell >= M) return 0;
  CompensatedSum<cplx> acc;
  for (long n = 1; ell * n < M; ++n) {
    if (mobius_small(ell * n) == 0) continue;
    acc.add(f_cutoff(double(ell * n), prm, M) * std::exp(-2.0 * s * std::log(double(n))));
  }
  return double(mu_l) * acc.value();
}

double inverse_coefficient(int n, const MollifierParams& prm, double M) {
  if (n < 1) throw DomainError("inverse_coefficient: n must be positive");
  const auto fac = factor_small(n);
  const int w = static_cast<int>(fac.size());
  double c = 0;
  // squarefree divisors are subsets of the prime factors
  for (int mask = 0; mask < (1 << w); ++mask) {
    long d = 1;
    int sign = 1;
    for (int i = 0; i < w; ++i)
      if (mask >> i & 1) d *= fac[i].first, sign = -sign;
    c += sign * f_cutoff(double(d), prm, M);
  }
  return c;
}

double inverse_l_coefficient(const HeckeEigenform& f, int n) {
  if (n < 1) throw DomainError("inverse_l_coefficient: n must be positive");
  long m = 1;
  int mu = 1;
  for (const auto& [p, e] : factor_small(n)) {
    if (e >= 3) return 0;
    if (e == 1) m *= p, mu = -mu;
  }
  return mu * lambda_at(f, m);
}

std::vector<double> lm_coefficients(const HeckeEigenform& f, const MollifierParams& prm, double M, int N) {
  if (N < 1) throw DomainError("lm_coefficients: N must be positive");
  lambda_at(f, N);
  std::vector<double> aF(N + 1, 0.0), b(N + 1, 0.0);
  for (int l = 1; l <= N; ++l) {
    long rad = 1;
    for (const auto& pe : factor_small(l)) rad *= pe.first;
    const double a = inverse_l_coefficient(f, l);
    if (a != 0) aF[l] = a * f_cutoff(double(rad), prm, M);
  }
  for (int l = 1; l <= N; ++l) {
    if (aF[l] == 0) continue;
    for (int m = 1; l * m <= N; ++m) b[l * m] += aF[l] * f.lambda[m];
  }
  return b;
}

MollifierValue mollifier_value(const HeckeEigenform& f, cplx s, double K, const MollifierParams& prm) {
  prm.validate();
  MollifierValue out;
  out.M = prm.M(K);
  if (!(out.M > 10)) throw DomainError("mollifier_value: M = K^{1-5 theta} must exceed 10");
  const long top = static_cast<long>(std::ceil(out.M)) - 1;  // F vanishes from M on
  lambda_at(f, top);
  // n = m k^2 with m, k squarefree and coprime, rad n = m k
  CompensatedSum<cplx> rad_sum;
  for (long m = 1; m <= top; ++m) {
    const int mu_m = mobius_small(m);
    if (mu_m == 0) continue;
    for (long k = 1; m * k <= top; ++k) {
      if (mobius_small(k) == 0 || std::gcd(m, k) != 1) continue;
      const double F = f_cutoff(double(m * k), prm, out.M);
      if (F == 0) continue;
      const double n = double(m) * k * k;
      rad_sum.add(mu_m * f.lambda[m] * F * std::exp(-s * std::log(n)));
      ++out.terms;
    }
  }
  CompensatedSum<cplx> coeff_sum;
  for (long l = 1; l <= top; ++l) {
    const cplx x = mollifier_coefficient(static_cast<int>(l), s, prm, out.M);
    if (x == 0.0) continue;
    coeff_sum.add(x * f.lambda[l] * std::exp(-s * std::log(double(l))));
  }
  out.by_radical = rad_sum.value();
  out.by_coefficients = coeff_sum.value();
  out.agreement = std::abs(out.by_radical - out.by_coefficients);
  return out;
}

// ---- omega regions

OmegaCase classify_omega(double delta, double t, double K, const OmegaConstants& c) {
  if (!(K >= 16)) throw DomainError("classify_omega: K must be at least 16 (log log K > 1)");
  const double L = std::log(K), LL = std::log(L);
  const double small = c.C / (L * LL), wide = c.C * LL / L;
  const double ad = std::abs(delta), at = std::abs(t);
  if (delta >= -c.B / L && delta <= wide && ad >= small && at >= small && at <= wide) return OmegaCase::one;
  if (ad <= small && at >= c.C1 / L && at <= c.C2 / L) return OmegaCase::two;
  if (ad >= c.A / L && ad <= wide && at <= small) return OmegaCase::three;
  return OmegaCase::none;
}

void require_case_one(double delta, double t, double K, const OmegaConstants& c) {
  switch (classify_omega(delta, t, K, c)) {
    case OmegaCase::one:
      return;
    case OmegaCase::two:
    case OmegaCase::three:
      throw DomainError("omega in case (II)/(III) is out of scope: deferred to the Conrey-Soundararajan method");
    case OmegaCase::none:
      break;
  }
  throw DomainError("omega lies outside the three admissible regions");
}

// ---- twisted second moment

TwistedMain twisted_moment_main(int ell, double delta, double t, double K, const SmoothBump& phi) {
  if (!(K > 1)) throw DomainError("twisted_moment_main: K must exceed 1");
  if (ell < 1 || ell > std::pow(K, 2 - 4 * 0.01)) throw DomainError("twisted_moment_main: need 1 <= ell <= K^{1.96}");
  if (!(delta >= -1 / std::log(K) && delta <= 0.5))
    throw DomainError("twisted_moment_main: need -1/log K <= delta <= 1/2");
  if (!(std::abs(t) <= std::pow(K, 1.0 / 200))) throw DomainError("twisted_moment_main: need |t| <= K^{1/200}");

  const double lx = std::log(K / (4 * kPi)), ll = std::log(double(ell));
  const double q = K / 4;
  const double eta_t = eta(cplx(0, t), ell).real();
  const double eta_d = eta(cplx(delta, 0), ell).real();
  const double I0 = phi.integral();
  const double I4 = bump_integral(phi, [&](double u) { return std::exp(-4 * delta * std::log(u)); });
  const double base = eta_t * q / std::sqrt(double(ell));

  TwistedMain r;
  if (delta != 0) {
    r.term1 = zeta(cplx(1 + 2 * delta, 0)).real() * base * std::exp(-delta * ll) * I0;
    r.term2 = zeta(cplx(1 - 2 * delta, 0)).real() * base * std::exp(delta * (ll - 4 * lx)) * I4;
  } else {
    const double inf = std::numeric_limits<double>::infinity();
    r.term1 = std::copysign(inf, base * I0);
    r.term2 = -r.term1;
  }
  // the 1/(2 delta) parts of the two zeta values combine into
  // int Phi e^{b} (e^{a-b} - 1)/(2 delta), a - b = delta c(u)
  const double J = bump_integral(phi, [&](double u) {
    const double lu = std::log(u);
    const double b = delta * (ll - 4 * lx - 4 * lu);
    return std::exp(b) * expm1_over(delta, -2 * ll + 4 * lx + 4 * lu) / 2;
  });
  r.merged12 = base * (zeta_minus_pole(cplx(1 + 2 * delta, 0)).real() * std::exp(-delta * ll) * I0 +
                       zeta_minus_pole(cplx(1 - 2 * delta, 0)).real() * std::exp(delta * (ll - 4 * lx)) * I4 + J);

  // third term: A(t) = C int Phi u^{-2 delta} e^{i t b(u)}, b = 2 log X + 2 log u - log l;
  // Re{A/(2it)} = C int Phi u^{-2 delta} sin(t b)/(2t) stays finite at t = 0
  const double C = eta_d * q / std::sqrt(double(ell)) * std::exp(-2 * delta * lx);
  auto b3 = [&](double u) { return 2 * lx + 2 * std::log(u) - ll; };
  const double Are = C * bump_integral(phi, [&](double u) {
    return std::exp(-2 * delta * std::log(u)) * std::cos(t * b3(u));
  });
  const double Aim = C * bump_integral(phi, [&](double u) {
    return std::exp(-2 * delta * std::log(u)) * std::sin(t * b3(u));
  });
  const double pole = C * bump_integral(phi, [&](double u) {
    return std::exp(-2 * delta * std::log(u)) * sin_over(t, b3(u)) / 2;
  });
  const cplx zr = zeta_minus_pole(cplx(1, 2 * t));
  r.term3 = -2 * ((zr * cplx(Are, Aim)).real() + pole);
  r.total = r.merged12 + r.term3;
  return r;
}

double twisted_moment_lhs(int ell, double delta, double t, double K, const SmoothBump& phi) {
  if (!(K > 0 && K <= 40)) throw DomainError("twisted_moment_lhs: K must lie in (0, 40]");
  if (ell < 1) throw DomainError("twisted_moment_lhs: ell must be positive");
  CompensatedSum<> acc;
  const int kmin = std::max(12, static_cast<int>(std::floor(phi.lo() * K)));
  const int kmax = static_cast<int>(std::ceil(phi.hi() * K)) + 1;
  for (int k = kmin; k <= kmax; ++k) {
    if (k % 4 != 2) continue;
    const double w = phi((k - 1) / K);
    if (w == 0 || dim_cusp_forms(k) == 0) continue;
    const AfeWeight V(k, delta, t);
    int N = std::max(ell, 600);
    for (;;) {
      try {
        CompensatedSum<> inner;
        for (const auto& f : hecke_basis(k, N)) inner.add(f.omega * f.lambda[ell] * l_squared_afe(f, V).value);
        acc.add(w * inner.value());
        break;
      } catch (const InsufficientCoefficients& e) {
        if (e.required <= N) throw;
        N = e.required;
      }
    }
  }
  return acc.value();
}

TwistedMoment twisted_moment(int ell, double delta, double t, double K, const SmoothBump& phi) {
  TwistedMoment m;
  m.main = twisted_moment_main(ell, delta, t, K, phi);
  m.lhs = twisted_moment_lhs(ell, delta, t, K, phi);
  m.ratio = m.lhs / m.main.total;
  return m;
}

// ---- Euler product identity

EulerProductT euler_product_T(cplx alpha, cplx beta, cplx s, int r, cplx z, int X, int P) {
  if (r < 1) throw DomainError("euler_product_T: r must be positive");
  if (X < 1000) throw DomainError("euler_product_T: X must be at least 1000");
  if (P < std::max(r, 100) || P > X) throw DomainError("euler_product_T: need max(r, 100) <= P <= X");
  const double m = std::max({0.0, -alpha.real(), -beta.real()});
  const cplx w1 = 1.0 + s + z, w2 = 1.0 + s + 2.0 * z;
  const double sig1 = w1.real() - m, sig2 = w2.real();
  if (!(sig1 > 1 && sig2 > 1)) throw DomainError("euler_product_T: the defining series does not converge absolutely");
  EulerProductT out;
  const int mu_r = mobius_small(r);
  if (mu_r == 0) return out;  // mu^2(l n r) = 0 and mu(r) = 0

  const ArithmeticTable tab(X);
  std::vector<cplx> pw2(X + 1);
  for (int n = 1; n <= X; ++n) pw2[n] = std::exp(-w2 * std::log(double(n)));

  CompensatedSum<cplx> total;
  for (long l = 1; l <= X; ++l) {
    const int mu_l = tab.mu(static_cast<int>(l));
    if (mu_l == 0 || std::gcd(l, long(r)) != 1) continue;
    cplx nu = 1;
    for (const auto& pe : tab.factor(static_cast<int>(l))) {
      const double lp = std::log(double(pe.first));
      nu *= std::exp(-alpha * lp) + std::exp(-beta * lp);
    }
    const long lr = l * r;
    CompensatedSum<cplx> inner;
    for (long n = 1; l * n <= X; ++n) {
      if (tab.mu(static_cast<int>(n)) == 0 || std::gcd(n, lr) != 1) continue;
      inner.add(pw2[n]);
    }
    total.add(double(mu_l * mu_r) * nu * std::exp(-w1 * std::log(double(l))) * inner.value());
  }
  out.double_sum = total.value();

  // |term| <= d(l) (l n)^{-sigma}; bound sum_{N > X} d_3(N) N^{-sigma}
  const double sig = std::min(sig1, sig2);
  const double zs = zeta(cplx(sig, 0)).real();
  auto T = [&](double y) { return y < 1 ? zs : std::pow(std::floor(y), 1 - sig) / (sig - 1); };
  double d_tail = zs * std::pow(double(X), 1 - sig) / (sig - 1);  // sum_{c > X} d(c) c^{-sigma}
  double tail = 0;
  for (int c = 1; c <= X; ++c) {
    const double cs = std::pow(double(c), -sig);
    d_tail += cs * T(double(X) / c);
    tail += tab.tau(c) * cs * T(double(X) / c);
  }
  out.sum_tail = tail + zs * d_tail;

  // closed form; every prime of r is <= P
  cplx G = 1;
  for (int p : tab.primes()) {
    if (p > P) break;
    const double lp = std::log(double(p));
    const cplx x = std::exp(-(w1 + alpha) * lp), y = std::exp(-(w1 + beta) * lp), w = std::exp(-w2 * lp);
    cplx g = (1.0 - w) / ((1.0 - x) * (1.0 - y));
    if (r % p != 0) g *= 1.0 - x - y + w;
    G *= g;
  }
  out.closed_form = double(mu_r) * G * zeta(w2) / (zeta(w1 + alpha) * zeta(w1 + beta));

  // G_p - 1 = (x w + y w - w^2 - x y) / ((1-x)(1-y)) for p > P
  const double ex = (w1 + alpha).real(), ey = (w1 + beta).real(), ew = w2.real();
  auto S = [&](double e) { return std::pow(double(P), 1 - e) / (e - 1); };
  const double den = (1 - std::pow(P + 1.0, -ex)) * (1 - std::pow(P + 1.0, -ey));
  const double E = (S(ex + ew) + S(ey + ew) + S(2 * ew) + S(ex + ey)) / den;
  out.closed_tail = std::abs(out.closed_form) * std::expm1(E);
  out.residual = std::abs(out.double_sum - out.closed_form);
  return out;
}

}  // namespace superpos
