#include "superpos/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace superpos {

Contour Contour::rectangle(double x0, double x1, double y0, double y1) {
  return Contour{{cplx(x0, y0), cplx(x1, y0), cplx(x1, y1), cplx(x0, y1)}};
}

namespace {

struct PhaseTracker {
  const std::function<cplx(cplx)>& phi;
  double max_step;
  long budget;
  long evals = 0;
  double min_abs = INFINITY, max_abs = 0;

  cplx eval(cplx z) {
    if (++evals > budget) throw NumericError("winding_number: evaluation budget exhausted");
    const cplx w = phi(z);
    const double a = std::abs(w);
    if (!std::isfinite(a)) {
      std::ostringstream os;
      os << "winding_number: non-finite value at " << z;
      throw NumericError(os.str());
    }
    if (a == 0.0) throw ContourTooCloseToZero("contour too close to zero", z);
    min_abs = std::min(min_abs, a);
    max_abs = std::max(max_abs, a);
    return w;
  }

  double segment(cplx z0, cplx f0, cplx z1, cplx f1, int depth) {
    const double whole = std::arg(f1 / f0);
    const cplx zm = 0.5 * (z0 + z1);
    const cplx fm = eval(zm);
    const double d1 = std::arg(fm / f0);
    const double d2 = std::arg(f1 / fm);
    const bool small = std::abs(d1) < max_step && std::abs(d2) < max_step &&
                       std::abs(whole) < max_step;
    if (small && std::abs(d1 + d2 - whole) < 1e-9) return d1 + d2;
    if (depth > 60) {
      throw ContourTooCloseToZero("contour too close to zero (phase not resolvable)", zm);
    }
    return segment(z0, f0, zm, fm, depth + 1) + segment(zm, fm, z1, f1, depth + 1);
  }
};

}  // namespace

WindingResult winding_number(const std::function<cplx(cplx)>& phi, const Contour& contour,
                             double max_step_phase, long max_evaluations) {
  if (contour.vertices.size() < 3) throw DomainError("winding_number: contour needs 3 vertices");
  if (!(max_step_phase > 0 && max_step_phase <= kPi / 2))
    throw DomainError("winding_number: max_step_phase must lie in (0, pi/2]");
  PhaseTracker tr{phi, max_step_phase, max_evaluations};
  const auto& v = contour.vertices;
  const int per_edge = 16;
  double total = 0;
  for (size_t e = 0; e < v.size(); ++e) {
    const cplx a = v[e], b = v[(e + 1) % v.size()];
    cplx z0 = a, f0 = tr.eval(a);
    for (int i = 1; i <= per_edge; ++i) {
      const cplx z1 = (i == per_edge) ? b : a + (b - a) * (double(i) / per_edge);
      const cplx f1 = tr.eval(z1);
      total += tr.segment(z0, f0, z1, f1, 0);
      z0 = z1;
      f0 = f1;
    }
  }
  WindingResult r;
  r.raw = total / (2 * kPi);
  r.winding = static_cast<int>(std::lround(r.raw));
  r.margin = std::abs(r.raw - r.winding);
  r.min_abs = tr.min_abs;
  r.max_abs = tr.max_abs;
  r.evaluations = tr.evals;
  if (tr.min_abs < 1e-12 * tr.max_abs)
    throw ContourTooCloseToZero("contour too close to zero: |phi| below 1e-12 of its maximum",
                                cplx(NAN, NAN));
  if (r.margin > 0.1) {
    std::ostringstream os;
    os << "winding_number: non-integer winding " << r.raw;
    throw NumericError(os.str());
  }
  return r;
}

struct SmoothBump::Cache {
  std::once_flag once;
  double third_moment = 0;
};

SmoothBump::SmoothBump(Rule rule, double lo, double hi, std::string name)
    : rule_(std::move(rule)), lo_(lo), hi_(hi), name_(std::move(name)),
      cache_(std::make_shared<Cache>()) {
  if (!(hi > lo)) throw DomainError("SmoothBump: empty support");
}

SmoothBump SmoothBump::standard() {
  return SmoothBump([](cplx x) { return std::exp(-1.0 / ((x - 1.0) * (2.0 - x))); }, 1.0, 2.0,
                    "standard");
}

SmoothBump SmoothBump::alternate() {
  return SmoothBump([](cplx x) { return x * x * std::exp(-2.0 / ((x - 1.0) * (2.0 - x))); },
                    1.0, 2.0, "alternate");
}

double SmoothBump::operator()(double x) const {
  if (!(x > lo_ && x < hi_)) return 0.0;
  return rule_(cplx(x, 0)).real();
}

// Cauchy integral on a circle inside the support. Accurate to roughly
// n! eps max|Phi| / r^n, which is plenty for the low orders used in tests.
double SmoothBump::derivative(double x, int order) const {
  if (order < 0) throw DomainError("SmoothBump::derivative: negative order");
  if (order == 0) return (*this)(x);
  if (!(x > lo_ && x < hi_)) return 0.0;
  const double r = 0.5 * std::min(x - lo_, hi_ - x);
  const int n = 64;
  cplx acc = 0;
  for (int j = 0; j < n; ++j) {
    const cplx e = std::polar(1.0, 2 * kPi * j / n);
    acc += rule_(x + r * e) * std::pow(e, -order);
  }
  return (acc / double(n)).real() * std::tgamma(order + 1.0) / std::pow(r, order);
}

double SmoothBump::integral() const { return hat(0.0).real(); }

cplx SmoothBump::mellin(cplx z) const {
  QuadOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-17;
  return integrate([&](double u) -> cplx { return (*this)(u) * std::exp(z * std::log(u)); }, lo_,
                   hi_, o)
      .value;
}

cplx SmoothBump::hat(double v) const {
  QuadOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-17;
  o.initial_panels = std::max(1, int(std::abs(v) * (hi_ - lo_)));
  return integrate(
             [&](double u) -> cplx { return (*this)(u) * std::polar(1.0, -2 * kPi * u * v); },
             lo_, hi_, o)
      .value;
}

// With u = x^2 the transform becomes sqrt(2/pi) int Phi(x) e^{i v x^2} dx.
cplx SmoothBump::check(double v) const {
  QuadOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-17;
  o.initial_panels = std::max(1, int(std::abs(v) * (hi_ * hi_ - lo_ * lo_) / (2 * kPi)));
  auto r = integrate([&](double x) -> cplx { return (*this)(x) * std::polar(1.0, v * x * x); },
                     lo_, hi_, o);
  return std::sqrt(2.0 / kPi) * r.value;
}

double SmoothBump::hat_third_moment() const {
  std::call_once(cache_->once, [&] {
    // |hat(v)| is even in v. Stop at the first octave [V, 2V) where hat is
    // either negligible against the peak of v^3|hat| or at its roundoff floor
    // (which grows like eps*v for the phase e^{-2 pi i u v}), and integrate over [0, V].
    // Inside the moment the transform uses the trapezoid rule on a fixed grid:
    // Phi is flat at both ends, so the only error is aliasing from hat(v+mN),
    // far below roundoff for v <= N/2.
    const int N = 2048;
    std::vector<double> xs(N + 1), ys(N + 1);
    for (int i = 0; i <= N; ++i) {
      xs[i] = lo_ + (hi_ - lo_) * i / N;
      ys[i] = (*this)(xs[i]) * (hi_ - lo_) / N;
    }
    auto fast_hat = [&](double v) {
      cplx acc = 0;
      const cplx step = std::polar(1.0, -2 * kPi * v * (hi_ - lo_) / N);
      cplx ph = std::polar(1.0, -2 * kPi * v * lo_);
      for (int i = 0; i <= N; ++i) {
        if (i % 64 == 0) ph = std::polar(1.0, -2 * kPi * v * xs[i]);
        acc += ys[i] * ph;
        ph *= step;
      }
      return acc;
    };
    auto g = [&](double v) { return v * v * v * std::abs(fast_hat(v)); };
    double peak = 0, V = 1;
    for (;;) {
      double local = 0, hmax = 0;
      for (int i = 0; i < 8; ++i) {
        const double v = V * (1 + i / 8.0);
        local = std::max(local, g(v));
        hmax = std::max(hmax, std::abs(fast_hat(v)));
      }
      peak = std::max(peak, local);
      if (local < 1e-10 * peak || hmax < 1e-15) break;
      if (V > N / 4) throw NumericError("hat_third_moment: transform does not decay");
      V *= 2;
    }
    QuadOptions o;
    o.rel_tol = 1e-8;
    o.abs_tol = 1e-9 * peak;
    o.initial_panels = int(2 * V);
    cache_->third_moment = 2 * integrate(g, 0.0, V, o).value;
  });
  return cache_->third_moment;
}

std::pair<cplx, cplx> bump_transforms(const SmoothBump& phi, double v) {
  return {phi.hat(v), phi.check(v)};
}

}  // namespace superpos
