#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "superpos/errors.hpp"
#include "superpos/quadrature.hpp"

namespace superpos {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Neumaier compensated accumulator.
template <class T = double>
class CompensatedSum {
 public:
  void add(T x) {
    if constexpr (std::is_same_v<T, double>) {
      acc(s_, c_, x);
    } else {
      double sr = s_.real(), si = s_.imag(), cr = c_.real(), ci = c_.imag();
      acc(sr, cr, x.real());
      acc(si, ci, x.imag());
      s_ = T(sr, si);
      c_ = T(cr, ci);
    }
  }
  CompensatedSum& operator+=(T x) {
    add(x);
    return *this;
  }
  T value() const { return s_ + c_; }

 private:
  static void acc(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
    else c += (x - t) + s;
    s = t;
  }
  T s_{};
  T c_{};
};

// Closed polyline in the complex plane, traversed vertex to vertex.
struct Contour {
  std::vector<cplx> vertices;
  static Contour rectangle(double x0, double x1, double y0, double y1);
};

struct WindingResult {
  int winding = 0;
  double margin = 0.0;    // distance of the raw count from the nearest integer
  double raw = 0.0;       // total phase change / 2pi
  double min_abs = 0.0;   // smallest |phi| sampled
  double max_abs = 0.0;
  long evaluations = 0;
};

// Counts zeros of phi inside the contour by tracking arg(phi) with adaptive
// bisection: each step is accepted only when it is below max_step_phase and
// agrees with the sum of its two halves.
WindingResult winding_number(const std::function<cplx(cplx)>& phi, const Contour& contour,
                             double max_step_phase = 0.5, long max_evaluations = 400000);

// Smooth nonnegative test function supported on [lo, hi]. The rule must be
// holomorphic on a neighbourhood of the open interval; derivatives use that.
class SmoothBump {
 public:
  using Rule = std::function<cplx(cplx)>;
  SmoothBump(Rule rule, double lo, double hi, std::string name);

  // exp(-1/((x-1)(2-x))) on (1,2)
  static SmoothBump standard();
  // x^2 exp(-2/((x-1)(2-x))): a second admissible shape for independence checks
  static SmoothBump alternate();

  double operator()(double x) const;
  double derivative(double x, int order) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::string& name() const { return name_; }

  double integral() const;              // int Phi
  cplx mellin(cplx z) const;            // int Phi(u) u^z du
  cplx hat(double v) const;             // int Phi(u) e^{-2 pi i u v} du
  cplx check(double v) const;           // int_0^inf Phi(sqrt u)/sqrt(2 pi u) e^{iuv} du
  double hat_third_moment() const;      // int |v|^3 |hat(v)| dv, cached

 private:
  struct Cache;
  Rule rule_;
  double lo_, hi_;
  std::string name_;
  std::shared_ptr<Cache> cache_;
};

std::pair<cplx, cplx> bump_transforms(const SmoothBump& phi, double v);

}  // namespace superpos
