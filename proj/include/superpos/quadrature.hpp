#pragma once

// Adaptive Gauss-Kronrod integration. Header-only because the integrand type
// is a template parameter (real or complex valued callables).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "superpos/errors.hpp"

namespace superpos {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 20000;
  int initial_panels = 1;
};

template <class T>
struct QuadratureResult {
  T value{};
  double error_estimate = 0.0;
  int panels_used = 0;
  double tail_bound = 0.0;   // only set by integrate_semiinfinite
  double cutoff = 0.0;       // truncation point U, likewise
  double abs_integral = 0.0; // approximation to the integral of |f|
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss 7-point weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7]
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
inline bool finite_value(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return std::isfinite(v);
  } else {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }
}

template <class T>
struct Panel {
  double a, b;
  T value;
  double err;
  double resabs;
  bool operator<(const Panel& o) const { return err < o.err; }
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  auto eval = [&](double x) -> T {
    T y = f(x);
    if (!finite_value(y)) {
      std::ostringstream os;
      os.precision(17);
      os << "integrand not finite at x = " << x;
      throw NonFiniteIntegrand(os.str(), x);
    }
    return y;
  };
  T fc = eval(c);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  double resabs = std::abs(fc) * kWgk[7];
  T fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    fv1[j] = eval(c - dx);
    fv2[j] = eval(c + dx);
    kron += (fv1[j] + fv2[j]) * kWgk[j];
    resabs += (std::abs(fv1[j]) + std::abs(fv2[j])) * kWgk[j];
    if (j % 2 == 1) gauss += (fv1[j] + fv2[j]) * kWg[j / 2];
  }
  // QUADPACK-style error scaling
  const T mean = kron * 0.5;
  double resasc = std::abs(fc - mean) * kWgk[7];
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  double err = std::abs((kron - gauss) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps))
    err = std::max(50 * eps * resabs, err);
  return {a, b, kron * h, err, resabs};
}

// Neumaier summation over the panels in left-endpoint order, so the result
// does not depend on heap layout.
template <class T>
T compensated_total(std::vector<Panel<T>>& panels) {
  std::sort(panels.begin(), panels.end(),
            [](const Panel<T>& x, const Panel<T>& y) { return x.a < y.a; });
  T s{}, comp{};
  for (const auto& p : panels) {
    T t = s + p.value;
    if constexpr (std::is_same_v<T, double>) {
      if (std::abs(s) >= std::abs(p.value)) comp += (s - t) + p.value;
      else comp += (p.value - t) + s;
    } else {
      double cr = 0, ci = 0;
      auto part = [](double sv, double pv, double tv) {
        return std::abs(sv) >= std::abs(pv) ? (sv - tv) + pv : (pv - tv) + sv;
      };
      cr = part(s.real(), p.value.real(), t.real());
      ci = part(s.imag(), p.value.imag(), t.imag());
      comp += T(cr, ci);
    }
    s = t;
  }
  return s + comp;
}

}  // namespace detail

// Globally adaptive GK15 on [a,b]. Throws QuadratureFailure (with the partial
// estimate) when the panel budget runs out before the tolerance is met.
template <class F>
auto integrate(F f, double a, double b, const QuadOptions& opt = {})
    -> QuadratureResult<decltype(f(a))> {
  using T = decltype(f(a));
  using detail::Panel;
  QuadratureResult<T> out;
  if (a == b) {
    out.panels_used = 1;
    return out;
  }
  if (!(opt.rel_tol > 0 || opt.abs_tol > 0))
    throw std::invalid_argument("integrate: tolerance must be positive");

  std::priority_queue<Panel<T>> heap;
  T total{};
  double total_err = 0, total_abs = 0;
  const int n0 = std::max(1, opt.initial_panels);
  for (int i = 0; i < n0; ++i) {
    const double x0 = a + (b - a) * i / n0;
    const double x1 = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
    auto p = detail::gk15<T>(f, x0, x1);
    total += p.value;
    total_err += p.err;
    total_abs += p.resabs;
    heap.push(p);
  }
  int panels = n0;
  const double eps = std::numeric_limits<double>::epsilon();
  auto converged = [&] {
    const double target = std::max(opt.rel_tol * std::abs(total), opt.abs_tol);
    // roundoff floor: nothing better is achievable in double
    return total_err <= target || total_err <= 100 * eps * total_abs;
  };
  while (!converged()) {
    if (panels + 1 > opt.max_panels) {
      std::vector<Panel<T>> all;
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      T partial = detail::compensated_total(all);
      std::ostringstream os;
      os << "integrate: panel budget " << opt.max_panels << " exhausted on [" << a << ", " << b
         << "], error estimate " << total_err;
      throw QuadratureFailure(os.str(), std::complex<double>(partial), total_err);
    }
    Panel<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {
      // interval no longer divisible in double
      std::ostringstream os;
      os << "integrate: cannot subdivide near x = " << mid;
      std::vector<Panel<T>> all{worst};
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      T partial = detail::compensated_total(all);
      throw QuadratureFailure(os.str(), std::complex<double>(partial), total_err);
    }
    auto l = detail::gk15<T>(f, worst.a, mid);
    auto r = detail::gk15<T>(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    total_err += l.err + r.err - worst.err;
    total_abs += l.resabs + r.resabs - worst.resabs;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  std::vector<Panel<T>> all;
  all.reserve(heap.size());
  double err = 0, absint = 0;
  while (!heap.empty()) {
    err += heap.top().err;
    absint += heap.top().resabs;
    all.push_back(heap.top());
    heap.pop();
  }
  out.value = detail::compensated_total(all);
  out.error_estimate = err;
  out.panels_used = panels;
  out.abs_integral = absint;
  return out;
}

template <class F>
auto integrate(F f, double a, double b, double rel_tol) {
  QuadOptions o;
  o.rel_tol = rel_tol;
  return integrate(f, a, b, o);
}

// Decay model for integrate_semiinfinite: |f(u)| <= C u^{-p} or C e^{-r u}.
struct DecayHint {
  enum class Kind { polynomial, exponential };
  Kind kind = Kind::exponential;
  double rate = 1.0;
  double cutoff = 400.0;
  double max_cutoff = 1e6;
  static DecayHint polynomial(double p, double cutoff = 400.0) {
    return {Kind::polynomial, p, cutoff, 1e6};
  }
  static DecayHint exponential(double r, double cutoff = 40.0) {
    return {Kind::exponential, r, cutoff, 1e6};
  }
};

namespace detail {

// Tail model fitted on samples in [U/2, U]; the constant is the max of
// |f(u)| times the inverse decay profile, which is conservative when the
// hint is right up to constants.
template <class F>
double modeled_tail(F& f, const DecayHint& h, double a, double U, double* signed_out) {
  double C = 0;
  double last = 0;
  const int ns = 9;
  for (int i = 0; i < ns; ++i) {
    const double u = a + (U - a) * (0.5 + 0.5 * i / (ns - 1));
    const auto y = f(u);
    double m = std::abs(y);
    if (!std::isfinite(m)) throw NonFiniteIntegrand("tail model: integrand not finite", u);
    if (h.kind == DecayHint::Kind::polynomial) m *= std::pow(u, h.rate);
    else m *= std::exp(h.rate * (u - U));
    C = std::max(C, m);
    if constexpr (std::is_same_v<decltype(y), const double>) last = y;
    else last = std::real(y);
  }
  double tail;
  if (h.kind == DecayHint::Kind::polynomial) tail = C * std::pow(U, 1.0 - h.rate) / (h.rate - 1.0);
  else tail = C / h.rate;
  *signed_out = last >= 0 ? tail : -tail;
  return tail;
}

}  // namespace detail

// Integrates f over [a, inf). The finite part is split at a, a+1, a+2, a+4,...
// so the adaptive panels see a graded mesh. The cutoff doubles until the
// modeled tail is below tol/2 of the value; that tail is added to both the
// value and the error estimate and reported in tail_bound.
template <class F>
auto integrate_semiinfinite(F f, const DecayHint& hint, const QuadOptions& opt = {},
                            double a = 0.0) -> QuadratureResult<decltype(f(a))> {
  using T = decltype(f(a));
  if (hint.kind == DecayHint::Kind::polynomial && !(hint.rate > 1))
    throw std::invalid_argument("integrate_semiinfinite: polynomial decay needs p > 1");
  if (hint.kind == DecayHint::Kind::exponential && !(hint.rate > 0))
    throw std::invalid_argument("integrate_semiinfinite: exponential rate must be positive");
  QuadratureResult<T> out;
  T acc{};
  double err = 0, absint = 0;
  int panels = 0;
  auto add_segment = [&](double x0, double x1) {
    auto r = integrate(f, x0, x1, opt);
    acc += r.value;
    err += r.error_estimate;
    absint += r.abs_integral;
    panels += r.panels_used;
  };
  double U = a + hint.cutoff;
  double x = a, w = 1.0;
  while (x < U) {
    const double nx = std::min(U, x + w);
    add_segment(x, nx);
    x = nx;
    w *= 2;
  }
  const double tol = std::max(opt.rel_tol, 1e-15);
  for (;;) {
    double signed_tail = 0;
    const double tail = detail::modeled_tail(f, hint, a, U, &signed_tail);
    // a near-cancelling integral is judged against a fraction of the L1 mass
    const double scale = std::max(std::abs(acc), absint * 1e-3);
    if (tail <= 0.5 * tol * scale || tail <= opt.abs_tol * 0.5) {
      out.value = acc + T(signed_tail);
      out.error_estimate = err + tail;
      out.tail_bound = tail;
      out.cutoff = U;
      out.panels_used = panels;
      out.abs_integral = absint + tail;
      return out;
    }
    if (2 * U - a > hint.max_cutoff) {
      std::ostringstream os;
      os << "integrate_semiinfinite: tail bound " << tail << " unverifiable at cutoff " << U;
      throw QuadratureFailure(os.str(), std::complex<double>(acc), err + tail);
    }
    const double len = U - a;
    for (int i = 0; i < 4; ++i) add_segment(U + len * i / 4.0, U + len * (i + 1) / 4.0);
    U = a + 2 * len;
  }
}

}  // namespace superpos
