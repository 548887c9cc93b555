#include "superpos/lfunction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "superpos/quadrature.hpp"
#include "superpos/specialfn.hpp"

namespace superpos {

namespace {

const double kLog2Pi = std::log(2 * kPi);

struct SplitTerm {
  cplx e1, e2;   // (2 pi n)^{-s'} Gamma(s', 2 pi n A), eps-free dual term
  double log_bound;  // log of n^{(k+1)/2} (|e1| + |e2|)
};

SplitTerm split_term(int k, cplx sp, int n, cplx A) {
  const double x = 2 * kPi * n;
  const double ln = std::log(double(n));
  const cplx a2 = double(k) - sp;
  const cplx l1 = -sp * std::log(x) + log_incomplete_gamma_upper(sp, x * A);
  const cplx l2 = -a2 * std::log(x) + log_incomplete_gamma_upper(a2, x / A);
  SplitTerm out;
  out.e1 = std::exp(l1);
  out.e2 = std::exp(l2);
  const double m = std::max(l1.real(), l2.real());
  out.log_bound = 0.5 * (k + 1) * ln + m + std::log(std::exp(l1.real() - m) + std::exp(l2.real() - m));
  return out;
}

}  // namespace

CompletedLFunction::CompletedLFunction(HeckeEigenform f, double tail_rel_tol, double rotation_budget)
    : f_(std::make_shared<const HeckeEigenform>(std::move(f))), tol_(tail_rel_tol), budget_(rotation_budget) {
  if (f_->max_n() < 1) throw DomainError("CompletedLFunction: form has no coefficients");
}

cplx CompletedLFunction::gamma_factor(cplx s) const {
  const cplx sp = s + 0.5 * (f_->k - 1);
  return std::exp(-sp * kLog2Pi + log_gamma(sp));
}

namespace {

// Shared driver: walks n upward, calling visit(n, term) until the geometric
// tail bound drops below tol * scale. Returns the last n needed.
template <class Visit>
int walk_series(int k, cplx s, double tol, double budget, int n_cap, Visit visit) {
  if (std::abs(s.imag()) > 50.5) throw DomainError("CompletedLFunction: |Im s| > 50 unsupported");
  const cplx sp = s + 0.5 * (k - 1);
  const cplx sq = double(k) - sp;
  // Sizes of the two leading terms; an argument with Re < 1/2 may sit on a
  // pole of Gamma and its term is then the minor one anyway.
  double l1 = -1e300, l2 = -1e300;
  if (sp.real() >= 0.5) l1 = (-sp * kLog2Pi + log_gamma(sp)).real();
  if (sq.real() >= 0.5) l2 = (-sq * kLog2Pi + log_gamma(sq)).real();
  const double log_scale = std::max(l1, l2);
  // Rotate the split point onto the saddle direction of the dominant term,
  // arg y = arg s' (or -arg(k-s')), capped so Re(2 pi n A) >= 2 pi n budget/|t|.
  const double theta = l1 >= l2 ? std::arg(sp) : -std::arg(sq);
  const double cap = std::max(0.0, 0.5 * kPi - budget / std::max(std::abs(s.imag()), 1e-300));
  const cplx A = std::polar(1.0, std::copysign(std::min(std::abs(theta), cap), theta));
  const double log_tol = std::log(tol) + log_scale;
  double prev = 0;
  for (int n = 1;; ++n) {
    const SplitTerm term = split_term(k, sp, n, A);
    visit(n, term);
    const double lb = term.log_bound;
    if (n > 1) {
      const double r = std::exp(lb - prev);
      if (r < 0.95 && lb - std::log1p(-r) < log_tol) return n;
    }
    prev = lb;
    if (n >= n_cap) {
      std::ostringstream os;
      os << "CompletedLFunction: series did not converge within " << n_cap << " terms at s = " << s;
      throw NumericError(os.str());
    }
  }
}

}  // namespace

int CompletedLFunction::required_terms(cplx s) const {
  return walk_series(f_->k, s, tol_, budget_, 1000000, [](int, const SplitTerm&) {});
}

cplx CompletedLFunction::lambda(cplx s) const { return lambda(s, nullptr); }

cplx CompletedLFunction::lambda(cplx s, int* terms) const {
  const int k = f_->k;
  const int nmax = f_->max_n();
  const double eps = f_->epsilon;
  CompensatedSum<cplx> acc;
  int need = 0;
  try {
    need = walk_series(k, s, tol_, budget_, nmax, [&](int n, const SplitTerm& t) {
      const double c = f_->lambda[n] * std::exp(0.5 * (k - 1) * std::log(double(n)));
      acc.add(c * (t.e1 + eps * t.e2));
    });
  } catch (const NumericError&) {
    const int req = required_terms(s);
    std::ostringstream os;
    os << "CompletedLFunction: weight " << k << " form needs " << req << " coefficients at s = " << s
       << ", has " << nmax;
    throw InsufficientCoefficients(os.str(), req);
  }
  if (terms) *terms = need;
  return acc.value();
}

CompletedLFunction make_lfunction(int k, int index, int num_coeffs) {
  const auto forms = hecke_basis(k, num_coeffs);
  if (index < 0 || index >= static_cast<int>(forms.size())) throw DomainError("make_lfunction: no such form");
  return CompletedLFunction(forms[index]);
}

// ---- derivatives

DerivativeTable lambda_derivatives(const CompletedLFunction& L, cplx center, int max_order, int nodes) {
  if (max_order < 0 || max_order > 24) throw DomainError("lambda_derivatives: order must be in 0..24");
  if (nodes < 4 * (max_order + 1)) throw DomainError("lambda_derivatives: too few nodes");
  // Doubling ladder of radii, limited by the supported height.
  std::vector<double> radii;
  for (double r = 0.25; r <= 32; r *= 2)
    if (std::abs(center.imag()) + r <= 50) radii.push_back(r);
  if (radii.size() < 2) throw DomainError("lambda_derivatives: center too high");
  const int R = static_cast<int>(radii.size());
  std::vector<std::vector<cplx>> D(R, std::vector<cplx>(max_order + 1));
  std::vector<std::vector<double>> noise(R, std::vector<double>(max_order + 1));
  for (int ri = 0; ri < R; ++ri) {
    const double r = radii[ri];
    std::vector<cplx> g(nodes);
    double M = 0;
    for (int q = 0; q < nodes; ++q) {
      g[q] = L.lambda(center + std::polar(r, 2 * kPi * q / nodes));
      M = std::max(M, std::abs(g[q]));
    }
    double logfact = 0;
    for (int j = 0; j <= max_order; ++j) {
      if (j > 0) logfact += std::log(double(j));
      CompensatedSum<cplx> c;
      for (int q = 0; q < nodes; ++q) c.add(g[q] * std::polar(1.0, -2 * kPi * double(j) * q / nodes));
      const double scale = std::exp(logfact - j * std::log(r));
      D[ri][j] = c.value() / double(nodes) * scale;
      noise[ri][j] = 1e-15 * M * scale;
    }
  }
  DerivativeTable out;
  out.center = center;
  for (int j = 0; j <= max_order; ++j) {
    int best = 0;
    for (int ri = 1; ri < R; ++ri)
      if (noise[ri][j] < noise[best][j]) best = ri;
    int second = best == 0 ? 1 : (best == R - 1 ? R - 2 : (noise[best - 1][j] < noise[best + 1][j] ? best - 1 : best + 1));
    const double diff = std::abs(D[best][j] - D[second][j]);
    const double floor_ = 100 * std::max(noise[best][j], noise[second][j]);
    if (diff > 1e-8 * std::abs(D[best][j]) && diff > floor_) {
      std::ostringstream os;
      os << "lambda_derivatives: radii " << radii[best] << " and " << radii[second] << " disagree at order " << j
         << " (" << diff << " vs |value| " << std::abs(D[best][j]) << ")";
      throw NumericError(os.str());
    }
    out.value.push_back(D[best][j]);
    out.error_estimate.push_back(std::max(diff, noise[best][j]));
    out.radius.push_back(radii[best]);
    out.noise.push_back(noise[best][j]);
  }
  return out;
}

// ---- AFE weight

namespace {

double log_gamma_pair(double re, int k, double t, double im = 0) {
  // log |Gamma(re + k/2 + i(im + t))Gamma(re + k/2 + i(im - t))| (real part only)
  return (log_gamma(cplx(re + 0.5 * k, im + t)) + log_gamma(cplx(re + 0.5 * k, im - t))).real();
}

void check_afe_domain(int k, double delta, double t) {
  if (k < 4 || k % 2) throw DomainError("afe_weight: k must be even and >= 4");
  if (delta < -4 / std::log(double(k)) || delta > 0.25) throw DomainError("afe_weight: delta out of range");
  if (std::abs(t) > k) throw DomainError("afe_weight: |t| must be <= k");
}

}  // namespace

AfeWeight::AfeWeight(int k, double delta, double t, double step) : k_(k), delta_(delta), t_(t) {
  check_afe_domain(k, delta, t);
  c_ = std::abs(delta) + 1;
  const double logG0 = log_gamma_pair(delta, k, t);
  auto node = [&](double T) {
    const cplx s(c_, T);
    const cplx h = mellin_h(s + delta) + mellin_h(s - delta);
    const cplx lg = log_gamma(s + cplx(0.5 * k, t)) + log_gamma(s + cplx(0.5 * k, -t)) - logG0;
    return step / (2 * kPi) * h * std::exp(lg);
  };
  const cplx a0 = node(0);
  double amax = std::abs(a0);
  std::vector<std::pair<double, cplx>> pos, neg;
  for (int dir : {1, -1}) {
    auto& side = dir > 0 ? pos : neg;
    int quiet = 0;
    for (int j = 1; quiet < 5; ++j) {
      const double T = dir * j * step;
      const cplx a = node(T);
      amax = std::max(amax, std::abs(a));
      side.emplace_back(T, a);
      quiet = std::abs(a) < 1e-22 * amax ? quiet + 1 : 0;
      if (j * step > 400) throw NumericError("AfeWeight: line integrand did not decay by |Im s| = 400");
    }
  }
  for (auto it = neg.rbegin(); it != neg.rend(); ++it) {
    T_.push_back(it->first);
    A_.push_back(it->second);
  }
  T_.push_back(0);
  A_.push_back(a0);
  for (auto& p : pos) {
    T_.push_back(p.first);
    A_.push_back(p.second);
  }
}

double AfeWeight::value(double y, double* imag_residue) const {
  if (!(y > 0)) throw DomainError("AfeWeight: y must be positive");
  const double lz = std::log(4 * kPi * kPi * y);
  const double mag = std::exp(-(c_ - delta_) * lz);
  CompensatedSum<cplx> s;
  for (size_t j = 0; j < T_.size(); ++j) s.add(A_[j] * std::polar(1.0, -T_[j] * lz));
  const cplx v = s.value() * mag;
  if (imag_residue) *imag_residue = std::abs(v.imag());
  return v.real();
}

double AfeWeight::y_derivative(double y) const {
  const double lz = std::log(4 * kPi * kPi * y);
  const double mag = std::exp(-(c_ - delta_) * lz);
  CompensatedSum<cplx> s;
  for (size_t j = 0; j < T_.size(); ++j)
    s.add(-cplx(c_ - delta_, T_[j]) * A_[j] * std::polar(1.0, -T_[j] * lz));
  return (s.value() * mag).real();
}

double AfeWeight::leading_terms(double y) const {
  const double lz = std::log(4 * kPi * kPi * y);
  return 1 + std::exp(2 * delta_ * lz + log_gamma_pair(-delta_, k_, t_) - log_gamma_pair(delta_, k_, t_));
}

double afe_weight(int k, double delta, double t, double y) { return AfeWeight(k, delta, t)(y); }

double afe_weight_real_space(int k, double delta, double t, double y) {
  check_afe_domain(k, delta, t);
  if (!(y > 0)) throw DomainError("afe_weight_real_space: y must be positive");
  const double Z = 4 * kPi * kPi * y, lZ = std::log(Z);
  const double logG0 = log_gamma_pair(delta, k, t);
  // xi = log x; v = Z/x; the u = 0 exponent peaks at v = k^2/4
  auto e0 = [&](double xi) {
    const double lv = lZ - xi;
    return 0.5 * k * lv - 2 * std::exp(0.5 * lv) - logG0 + delta * lZ;
  };
  const double hi = std::log(2.0);
  const double peak_xi = std::min(hi, 2 * std::log(2 * std::sqrt(Z) / k));
  const double top = e0(peak_xi);
  double lo = peak_xi;
  while (e0(lo) > top - 60) lo -= 0.25;
  auto inner = [&](double xi) {
    const double lv = lZ - xi;
    const double w = 2 * std::exp(0.5 * lv);
    const double base = 0.5 * k * lv - logG0 + delta * lZ;
    double U = 0.5;
    while (w * (std::cosh(U) - 1) < 60) U *= 1.25;
    QuadOptions o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-300;
    o.initial_panels = 4 + static_cast<int>(2 * std::abs(t) * U / kPi);
    return integrate([&](double u) { return std::exp(base - w * std::cosh(u)) * std::cos(2 * t * u); }, 0.0, U, o)
        .value;
  };
  auto outer = [&](double xi) {
    const double x = std::exp(xi);
    return 2 * (std::exp(delta * xi) + std::exp(-delta * xi)) * cutoff_h(x) * inner(xi);
  };
  QuadOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-300;
  o.initial_panels = 16;
  return integrate(outer, lo, hi, o).value;
}

// ---- AFE sum

AfeSum l_squared_afe(const HeckeEigenform& f, double delta, double t) {
  return l_squared_afe(f, AfeWeight(f.k, delta, t));
}

AfeSum l_squared_afe(const HeckeEigenform& f, const AfeWeight& V) {
  if (V.k() != f.k) throw DomainError("l_squared_afe: weight mismatch");
  const int k = f.k;
  const double delta = V.delta(), t = V.t();
  const int hard_cap = 40 * k * k;
  const double bulk = std::pow(k / (4 * kPi), 2);
  std::vector<double> vt(2, 0.0);
  vt[1] = V(1.0);
  double vmax = std::abs(vt[1]);
  int y_max = 1;
  // past the bulk V decays like exp(-4 pi sqrt y); the line quadrature has
  // a roundoff floor near 1e-18, so the cut is relative
  for (int m = 2; m <= hard_cap; ++m) {
    const double v = V(double(m));
    vmax = std::max(vmax, std::abs(v));
    if (m > bulk && std::abs(v) < 1e-15 * vmax) break;
    vt.push_back(v);
    y_max = m;
  }
  if (f.max_n() < y_max) {
    std::ostringstream os;
    os << "l_squared_afe: weight " << k << " needs lambda(n) up to n = " << y_max << ", has " << f.max_n();
    throw InsufficientCoefficients(os.str(), y_max);
  }
  std::vector<double> a(y_max + 1, 0.0);
  for (int n = 1; n <= y_max; ++n)
    a[n] = f.lambda[n] * eta(cplx(0, t), n).real() * std::exp(-(0.5 + delta) * std::log(double(n)));
  AfeSum out;
  CompensatedSum<> acc;
  for (long d = 1; d * d <= y_max; ++d) {
    const double wd = std::exp(-(1 + 2 * delta) * std::log(double(d)));
    for (long n = 1; n * d * d <= y_max; ++n) {
      acc.add(wd * a[n] * vt[n * d * d]);
      ++out.terms;
    }
  }
  out.value = acc.value();
  out.y_max = y_max;
  out.v_at_cutoff = V(double(y_max + 1));
  return out;
}

}  // namespace superpos
