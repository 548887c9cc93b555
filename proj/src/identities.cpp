#include "superpos/identities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "superpos/quadrature.hpp"
#include "superpos/specialfn.hpp"

namespace superpos {

// ---- Petersson

PeterssonCheck petersson_check(int k, int m, int n, int c_max, const std::vector<double>* weights) {
  if (m < 1 || n < 1 || m > 50 || n > 50) throw DomainError("petersson_check: m, n must lie in [1, 50]");
  const auto forms = hecke_basis(k, std::max({m, n, 2}));
  if (weights && weights->size() != forms.size()) throw DomainError("petersson_check: weight count mismatch");
  PeterssonCheck r;
  CompensatedSum<> lhs;
  for (size_t i = 0; i < forms.size(); ++i)
    lhs.add((weights ? (*weights)[i] : forms[i].omega) * forms[i].lambda[m] * forms[i].lambda[n]);
  r.lhs = lhs.value();
  // |S(m,n;c)| <= c and |J_nu(x)| <= (x/2)^nu/nu!, so the c-th term is at most
  // 2 pi (2 pi sqrt(mn)/c)^{k-1}/(k-1)!; the tail is bounded by the integral.
  const double logA = std::log(2 * kPi) + (k - 1) * std::log(2 * kPi * std::sqrt(double(m) * n)) - std::lgamma(k);
  auto tail = [&](int C) { return std::exp(logA - (k - 2) * std::log(double(C)) - std::log(k - 2.0)); };
  if (c_max <= 0) {
    c_max = 1;
    while (tail(c_max) >= 1e-12) ++c_max;
  }
  r.c_max = c_max;
  r.tail_bound = tail(c_max);
  const double sign = (k / 2) % 2 ? -1.0 : 1.0;  // i^{-k}
  CompensatedSum<> rhs;
  rhs.add(m == n ? 1.0 : 0.0);
  for (int c = 1; c <= c_max; ++c) {
    const double x = 4 * kPi * std::sqrt(double(m) * n) / c;
    rhs.add(2 * kPi * sign * kloosterman(m, n, c) / c * bessel_j_integer(k - 1, x));
  }
  r.rhs = rhs.value();
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

// ---- J-Bessel average over k = 2 mod 4

BesselAverageCheck bessel_average_check(double K, double x, const SmoothBump& phi) {
  if (!(K >= 20 && K <= 200)) throw DomainError("bessel_average_check: K must lie in [20, 200]");
  // K/8 rather than K/4: the left-of-support example needs it
  if (!(x >= K / 8 && x <= 4 * K)) throw DomainError("bessel_average_check: x must lie in [K/8, 4K]");
  BesselAverageCheck r;
  const int nmax = static_cast<int>(std::ceil(phi.hi() * K)) + 1;
  const auto J = bessel_j_sequence(nmax, x);
  CompensatedSum<> lhs;
  for (int nu = 1; nu <= nmax; nu += 4) {  // nu = k - 1 with k = 2 mod 4
    const double w = phi(nu / K);
    if (w == 0) continue;
    lhs.add(4 * w * J[nu]);
    ++r.terms;
  }
  r.lhs = lhs.value();
  r.main_term = phi(x / K);
  const cplx osc = std::polar(1.0, x - kPi / 4) * phi.check(K * K / (2 * x));
  r.oscillatory = K / std::sqrt(x) * osc.imag();
  r.error = std::abs(r.lhs - r.main_term - r.oscillatory);
  r.scaled_error = r.error * K * K * K / (x * phi.hat_third_moment());
  return r;
}

// ---- Voronoi summation for eta_{it}

VoronoiTestFunction VoronoiTestFunction::gaussian_bump(double lo, double hi) {
  if (!(hi > lo)) throw DomainError("gaussian_bump: empty support");
  const double mid = 0.5 * (lo + hi), width = 0.25 * (hi - lo);
  return {[=](double x) {
            if (!(x > lo && x < hi)) return 0.0;
            const double u = (x - lo) / (hi - lo);
            const double z = (x - mid) / width;
            return std::exp(-1.0 / (u * (1 - u)) - z * z);
          },
          lo, hi};
}

namespace {

// J+_{2it} and K+_{2it} on [0, inf) as Chebyshev interpolants on panels of
// length 2, built on demand. Both are even in t, so tables are keyed by |t|.
class KernelTable {
 public:
  explicit KernelTable(double t) : t_(std::abs(t)) {
    for (int i = 0; i < kNodes; ++i) x_[i] = std::cos(kPi * (i + 0.5) / kNodes);
  }
  std::pair<double, double> operator()(double y) {
    const int p = static_cast<int>(y / kLen);
    const Panel& P = panel(p);
    const double u = 2 * (y - p * kLen) / kLen - 1;
    return {clenshaw(P.cj, u), clenshaw(P.ck, u)};
  }

 private:
  static constexpr int kNodes = 18;
  static constexpr double kLen = 2.0;
  struct Panel {
    std::array<double, kNodes> cj, ck;
  };
  static double clenshaw(const std::array<double, kNodes>& c, double u) {
    double b1 = 0, b2 = 0;
    for (int j = kNodes - 1; j >= 1; --j) {
      const double b = 2 * u * b1 - b2 + c[j];
      b2 = b1;
      b1 = b;
    }
    return u * b1 - b2 + 0.5 * c[0];
  }
  const Panel& panel(int p) {
    std::lock_guard<std::mutex> lock(mu_);
    if (p >= static_cast<int>(panels_.size())) panels_.resize(p + 1);
    auto& slot = panels_[p];
    if (!slot) {
      std::array<double, kNodes> fj{}, fk{};
      for (int i = 0; i < kNodes; ++i) {
        const double y = p * kLen + 0.5 * kLen * (x_[i] + 1);
        // y = 0 is never a node; the first-kind points avoid the endpoints
        const auto b = bessel_imag_order(t_, y);
        fj[i] = b.jplus;
        fk[i] = b.kplus;
      }
      auto P = std::make_unique<Panel>();
      for (int j = 0; j < kNodes; ++j) {
        double sj = 0, sk = 0;
        for (int i = 0; i < kNodes; ++i) {
          const double w = std::cos(kPi * j * (i + 0.5) / kNodes);
          sj += fj[i] * w;
          sk += fk[i] * w;
        }
        P->cj[j] = 2.0 / kNodes * sj;
        P->ck[j] = 2.0 / kNodes * sk;
      }
      slot = std::move(P);
    }
    return *slot;
  }
  double t_;
  std::array<double, kNodes> x_;
  std::vector<std::unique_ptr<Panel>> panels_;
  std::mutex mu_;
};

std::shared_ptr<KernelTable> kernel_table(double t) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<KernelTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& e = cache[std::abs(t)];
  if (!e) e = std::make_shared<KernelTable>(t);
  return e;
}

// 20-point Gauss-Legendre on [-1, 1]
const std::array<double, 10> kGlx = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                                      0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                                      0.8391169718222188, 0.9122344282513258, 0.9639719272779138,
                                      0.9931285991850949};
const std::array<double, 10> kGlw = {0.1527533871307258, 0.1491729864726037, 0.1420961093183819,
                                      0.1316886384491765, 0.1181945319615182, 0.1019301198172403,
                                      0.0832767415767047, 0.0626720483341094, 0.0406014298003862,
                                      0.0176140071391533};

}  // namespace

VoronoiCheck voronoi_check(double t, int a, int c, const VoronoiTestFunction& g, int max_dual_terms) {
  if (c < 1 || c > 12) throw DomainError("voronoi_check: c must lie in [1, 12]");
  if (gcd64(a, c) != 1) throw DomainError("voronoi_check: need gcd(a, c) = 1");
  if (!(std::abs(t) >= 0.05 && std::abs(t) <= 2)) throw DomainError("voronoi_check: |t| must lie in [0.05, 2]");
  if (!(g.lo >= 1 && g.hi <= 40 && g.hi > g.lo)) throw DomainError("voronoi_check: support must lie in [1, 40]");
  const cplx it(0, t);
  const int d = c == 1 ? 0 : static_cast<int>(inverse_mod(((a % c) + c) % c, c));
  auto e = [](double x) { return std::polar(1.0, 2 * kPi * x); };
  VoronoiCheck r;

  CompensatedSum<cplx> lhs;
  for (int n = static_cast<int>(std::ceil(g.lo)); n <= static_cast<int>(std::floor(g.hi)); ++n)
    lhs.add(eta(it, n) * g.g(n) * e(double(a) * n / c));
  r.lhs = lhs.value();

  QuadOptions o;
  o.rel_tol = 1e-13;
  auto mell = [&](double sgn) {
    return integrate([&](double x) { return g.g(x) * std::exp(sgn * it * std::log(x)); }, g.lo, g.hi, o).value;
  };
  const double cc = c;
  r.zeta_terms = std::exp((2.0 * it - 1.0) * std::log(cc)) * zeta(1.0 - 2.0 * it) * mell(-1) +
                 std::exp((-2.0 * it - 1.0) * std::log(cc)) * zeta(1.0 + 2.0 * it) * mell(1);

  // dual integrals in y = 4 pi sqrt(n x)/c, where the kernels are tabulated:
  // int g(x) F(4 pi sqrt(nx)/c) dx = 2 (c/4pi)^2/n int g(x(y)) F(y) y dy
  auto& table = *kernel_table(t);
  const double q = cc / (4 * kPi);
  auto dual = [&](int n, double* ij, double* ik, bool want_k) {
    const double y0 = std::sqrt(n * g.lo) / q, y1 = std::sqrt(n * g.hi) / q;
    const int panels = std::max(64, static_cast<int>(std::ceil((y1 - y0) / 2)));
    const double h = (y1 - y0) / panels;
    CompensatedSum<> sj, sk;
    for (int p = 0; p < panels; ++p) {
      const double mid = y0 + (p + 0.5) * h;
      for (int i = 0; i < 10; ++i)
        for (int sgn : {-1, 1}) {
          const double y = mid + sgn * 0.5 * h * kGlx[i];
          const double x = q * q * y * y / n;
          const double gw = g.g(x) * y * kGlw[i] * 0.5 * h;
          if (gw == 0) continue;
          const auto [jp, kp] = table(y);
          sj.add(gw * jp);
          if (want_k) sk.add(gw * kp);
        }
    }
    *ij = 2 * q * q / n * sj.value();
    *ik = 2 * q * q / n * sk.value();
  };

  CompensatedSum<cplx> js, ks;
  const int window = 64, cap = 400000;
  double window_max = 0;
  for (int n = 1;; ++n) {
    if (max_dual_terms > 0 && n > max_dual_terms) {
      // size of the first omitted J term, for truncation studies
      double ij = 0, ik = 0;
      dual(n, &ij, &ik, false);
      r.last_j_term = std::abs(ij) / cc;
      break;
    }
    if (n > cap) throw NumericError("voronoi_check: dual sum did not settle");
    // |K+_{2it}(y)| <= 4 cosh(pi t) sqrt(pi/2y) e^{-y}: negligible past y = 45
    const bool want_k = std::sqrt(n * g.lo) / q < 45;
    double ij = 0, ik = 0;
    dual(n, &ij, &ik, want_k);
    const cplx en = eta(it, n);
    js.add(en * e(-double(d) * n / c) * ij);
    ++r.j_terms;
    if (want_k) {
      ks.add(en * e(double(d) * n / c) * ik);
      ++r.k_terms;
    }
    window_max = std::max(window_max, std::abs(ij));
    if (n % window == 0) {
      r.last_j_term = window_max;
      if (window_max < 1e-14 && !want_k) break;
      window_max = 0;
    }
  }
  r.j_sum = js.value() / cc;
  r.k_sum = ks.value() / cc;
  r.rhs = r.zeta_terms + r.j_sum + r.k_sum;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

// ---- Dirichlet series identities

DirichletCheck dirichlet_identity_check(std::optional<int> ell, cplx s, int c_max, int d_max) {
  if (!(s.real() >= 0.75)) throw DomainError("dirichlet_identity_check: need Re s >= 0.75");
  if (c_max < 1000 || d_max < 1000) throw DomainError("dirichlet_identity_check: c_max, d_max must be >= 1000");
  if (ell && *ell < 1) throw DomainError("dirichlet_identity_check: ell must be positive");
  const ArithmeticTable tab(c_max);
  const cplx w = 1.0 + 2.0 * s;
  const double sig = s.real();
  CompensatedSum<cplx> sc, sd;
  double abs_c = 0;
  double coef_bound = 0;  // sup |coefficient| / c^{exponent} used in the tail
  if (ell) {
    // Ramanujan sum S(0, ell; c) = sum_{delta | (c, ell)} mu(c/delta) delta
    for (int c = 1; c <= c_max; ++c) {
      const auto gg = gcd64(c, *ell);
      double rc = 0;
      for (int delta = 1; delta <= gg; ++delta)
        if (gg % delta == 0) rc += tab.mu(c / delta) * delta;
      const cplx term = rc * std::exp(-w * std::log(double(c)));
      sc.add(term);
      abs_c += std::abs(term);
    }
    for (int delta = 1; delta <= *ell; ++delta)
      if (*ell % delta == 0) coef_bound += delta;
  } else {
    for (int c = 1; c <= c_max; ++c) {
      const cplx term = double(tab.phi(c)) * std::exp(-w * std::log(double(c)));
      sc.add(term);
      abs_c += std::abs(term);
    }
  }
  for (int d = 1; d <= d_max; ++d) sd.add(std::exp(-w * std::log(double(d))));
  DirichletCheck r;
  r.sum = sc.value() * sd.value();
  // |c-tail| <= B C^{-2 sigma}/(2 sigma) for |S(0,ell;c)| <= sigma_1(ell),
  // or C^{1-2 sigma}/(2 sigma - 1) for phi(c) <= c
  const double tail_c = ell ? coef_bound * std::pow(c_max, -2 * sig) / (2 * sig)
                            : std::pow(c_max, 1 - 2 * sig) / (2 * sig - 1);
  const double tail_d = std::pow(d_max, -2 * sig) / (2 * sig);
  r.tail_bound = tail_c * zeta(cplx(1 + 2 * sig, 0)).real() + abs_c * tail_d;
  if (ell) r.closed_form = std::exp(-s * std::log(double(*ell))) * eta(s, *ell);
  else r.closed_form = zeta(2.0 * s);
  r.residual = std::abs(r.sum - r.closed_form);
  return r;
}

}  // namespace superpos
