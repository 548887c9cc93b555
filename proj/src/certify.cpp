#include "superpos/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "superpos/quadrature.hpp"

namespace superpos {

TriangleRegion::TriangleRegion(double r) : rho(r) {
  if (!(r >= 0.005 && r <= 0.1)) throw DomainError("TriangleRegion: rho must lie in [0.005, 0.1]");
}

double TriangleRegion::rect_left() const { return 0.5 + rho / std::sqrt(2.0); }

bool TriangleRegion::in_triangle(cplx s) const {
  return s.real() > 0.5 && s.real() < 1 && std::abs(s.imag()) <= s.real() - 0.5;
}

bool TriangleRegion::in_rect(cplx s) const {
  return s.real() >= rect_left() && s.real() <= 1 && std::abs(s.imag()) <= 0.5;
}

Contour TriangleRegion::disk_contour(int sides) const {
  Contour c;
  const double R = rho / std::cos(kPi / sides);
  for (int i = 0; i < sides; ++i) c.vertices.push_back(0.5 + std::polar(R, 2 * kPi * (i + 0.5) / sides));
  return c;
}

Contour TriangleRegion::rect_contour() const { return Contour::rectangle(rect_left(), 1.0, -0.5, 0.5); }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::not_certified: return "not-certified";
    default: return "failed";
  }
}

DerivativeSign classify_derivative(double value, double bound) {
  const double r = std::abs(value) / bound;
  if (r < kZeroThreshold) return DerivativeSign::zero;
  if (r <= kNonzeroThreshold) return DerivativeSign::indeterminate;
  return value > 0 ? DerivativeSign::positive : DerivativeSign::negative;
}

namespace {

double cauchy_bound(const DerivativeTable& d, int j) { return d.noise[j] * 1e15; }

}  // namespace

int central_order(const DerivativeTable& d, int epsilon, std::string* why) {
  const int first = epsilon > 0 ? 0 : 1;
  for (int j = first; j < static_cast<int>(d.value.size()); j += 2) {
    const auto c = classify_derivative(d.value[j].real(), cauchy_bound(d, j));
    if (c == DerivativeSign::zero) continue;
    if (c == DerivativeSign::indeterminate) {
      if (why) *why = "derivative of order " + std::to_string(j) + " is between the zero and nonzero thresholds";
      return -1;
    }
    return j;
  }
  if (why) *why = "no nonzero central derivative up to the requested order";
  return -1;
}

ZeroCertificate certify_region(const std::function<cplx(cplx)>& phi0, int m, double rho, const std::string& id,
                               const std::vector<double>& line_zeros) {
  const TriangleRegion tri(rho);
  ZeroCertificate z;
  z.form_id = id;
  z.rho = rho;
  z.central_order = m;
  z.line_zeros = line_zeros;
  // Zeros on sigma = 1/2 lie outside both the rectangle and the open
  // triangle; removing them leaves the disk count equal to m.
  auto phi = [&](cplx s) {
    cplx v = phi0(s);
    for (double g : line_zeros) v /= (s - cplx(0.5, g)) * (s - cplx(0.5, -g));
    return v;
  };
  try {
    const auto disk = winding_number(phi, tri.disk_contour());
    // (s-1/2)^m has no zeros in the rectangle, so the winding is unchanged
    double raw_min = 1e308, raw_max = 0;
    const auto rect = winding_number(
        [&](cplx s) {
          const cplx v = phi(s);
          raw_min = std::min(raw_min, std::abs(v));
          raw_max = std::max(raw_max, std::abs(v));
          return v / std::pow(s - 0.5, m);
        },
        tri.rect_contour());
    z.rect_margin_undeflated = raw_min / raw_max;
    z.disk_winding = disk.winding;
    z.rect_winding = rect.winding;
    z.disk_raw = disk.raw;
    z.rect_raw = rect.raw;
    z.disk_margin = disk.min_abs / disk.max_abs;
    z.rect_margin = rect.min_abs / rect.max_abs;
    z.evaluations = disk.evaluations + rect.evaluations;
  } catch (const NumericError& e) {
    z.verdict = Verdict::failed;
    z.reason = e.what();
    return z;
  }
  std::ostringstream os;
  if (z.disk_margin <= kMarginThreshold || z.rect_margin <= kMarginThreshold) {
    z.verdict = Verdict::failed;
    os << "contour margin below " << kMarginThreshold << " (disk " << z.disk_margin << ", rect " << z.rect_margin
       << ")";
  } else if (z.rect_winding != 0) {
    z.verdict = Verdict::not_certified;
    os << z.rect_winding << " zero(s) inside the rectangle";
  } else if (z.disk_winding != m) {
    z.verdict = Verdict::not_certified;
    os << "disk winding " << z.disk_winding << " differs from central order " << m;
  } else {
    z.verdict = Verdict::certified;
    os << "no zeros in the open triangle";
  }
  z.reason = os.str();
  return z;
}

ZeroCertificate certify_triangle(const CompletedLFunction& L, double rho, int max_order) {
  TriangleRegion check(rho);
  (void)check;
  const auto& f = L.form();
  const std::string id = "k" + std::to_string(f.k) + "#" + std::to_string(f.index);
  ZeroCertificate z;
  DerivativeTable d;
  try {
    d = lambda_derivatives(L, 0.5, max_order);
  } catch (const NumericError& e) {
    z.form_id = id;
    z.weight = f.k;
    z.epsilon = f.epsilon;
    z.rho = rho;
    z.reason = e.what();
    return z;
  }
  std::string why;
  const int m = central_order(d, f.epsilon, &why);
  if (m < 0) {
    z.form_id = id;
    z.rho = rho;
    z.reason = why;
  } else {
    z = certify_region([&L](cplx s) { return L.lambda(s); }, m, rho, id, critical_line_zeros(L, 1e-3, 1.0, 0.01));
  }
  z.weight = f.k;
  z.epsilon = f.epsilon;
  for (const auto& v : d.value) z.central_derivatives.push_back(v.real());
  return z;
}

SuperpositivityReport superpositivity_report(const CompletedLFunction& L, int max_order) {
  SuperpositivityReport r;
  r.max_order = max_order;
  const auto d = lambda_derivatives(L, 0.5, max_order);
  const int eps = L.epsilon();
  r.clause1 = true;
  for (int j = 0; j <= max_order; ++j) {
    r.central.push_back(d.value[j].real());
    // the functional equation forces the other parity to vanish identically
    const bool forced = (j % 2 == 1) == (eps > 0);
    const auto c = forced ? DerivativeSign::zero : classify_derivative(d.value[j].real(), cauchy_bound(d, j));
    r.central_sign.push_back(c);
    if (c == DerivativeSign::negative || c == DerivativeSign::indeterminate) r.clause1 = false;
  }
  r.k0 = central_order(d, eps);
  r.clause3 = r.k0 >= 0;
  if (r.clause3)
    for (int j = r.k0; j <= max_order; j += 2)
      if (r.central_sign[j] != DerivativeSign::positive && r.central_sign[j] != DerivativeSign::negative)
        r.clause3 = false;
  r.sigmas = {0.6, 0.75, 0.9, 1.1};
  r.clause2 = true;
  for (double s : r.sigmas) {
    const auto ds = lambda_derivatives(L, s, max_order);
    std::vector<double> v;
    std::vector<DerivativeSign> sg;
    for (int j = 0; j <= max_order; ++j) {
      v.push_back(ds.value[j].real());
      sg.push_back(classify_derivative(ds.value[j].real(), cauchy_bound(ds, j)));
      if (sg.back() != DerivativeSign::positive) r.clause2 = false;
    }
    r.off_center.push_back(v);
    r.off_center_sign.push_back(sg);
  }
  return r;
}

// ---- Hadamard product on the critical line

std::vector<double> critical_line_zeros(const CompletedLFunction& L, double a, double b, double step) {
  if (!(b > a && step > 0)) throw DomainError("critical_line_zeros: empty range");
  const int eps = L.epsilon();
  // dividing by |gamma factor| keeps the values of moderate size
  auto Z = [&](double t) {
    const cplx s(0.5, t);
    const cplx v = L.lambda(s) / std::abs(L.gamma_factor(s));
    return eps > 0 ? v.real() : v.imag();
  };
  std::vector<double> zs;
  const int n = static_cast<int>(std::ceil((b - a) / step));
  double t0 = a, z0 = Z(a);
  for (int i = 1; i <= n; ++i) {
    const double t1 = a + (b - a) * i / n, z1 = Z(t1);
    if ((z0 < 0) != (z1 < 0)) {
      double lo = t0, hi = t1, zlo = z0;
      while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi), zm = Z(mid);
        if ((zm < 0) == (zlo < 0)) {
          lo = mid;
          zlo = zm;
        } else {
          hi = mid;
        }
      }
      zs.push_back(0.5 * (lo + hi));
    }
    t0 = t1;
    z0 = z1;
  }
  return zs;
}

HadamardCheck hadamard_cross_check(const CompletedLFunction& L, double T, double sigma) {
  if (!(T > 1 && T <= 30)) throw DomainError("hadamard_cross_check: T must lie in (1, 30]");
  if (!(sigma > 0.6 && sigma <= 2)) throw DomainError("hadamard_cross_check: sigma must lie in (0.6, 2]");
  HadamardCheck h;
  const int eps = L.epsilon();
  const auto d = lambda_derivatives(L, 0.5, 8);
  h.central_order = central_order(d, eps);
  if (h.central_order < 0) throw NumericError("hadamard_cross_check: central order not determined");
  double fact = 1;
  for (int j = 2; j <= h.central_order; ++j) fact *= j;
  const double lead = d.value[h.central_order].real() / fact;
  if (!(lead > 0)) throw NumericError("hadamard_cross_check: leading central coefficient not positive");
  h.log_scale = std::log(lead);

  h.top = T;
  h.zeros = critical_line_zeros(L, h.t0, h.top);
  // keep the top edge of the counting box away from a zero
  if (!h.zeros.empty() && h.top - h.zeros.back() < 0.02) {
    h.top += 0.03;
    h.zeros = critical_line_zeros(L, h.t0, h.top);
  }
  h.sign_change_count = static_cast<int>(h.zeros.size());
  // The gamma factor has no zeros or poles near the line, so L and Lambda
  // have the same winding; L avoids Lambda's e^{-pi t/2} dynamic range.
  const auto w = winding_number([&](cplx s) { return L.l_value(s); },
                                Contour::rectangle(0.45, 0.55, h.t0, h.top));
  h.winding_count = w.winding;
  if (h.winding_count != h.sign_change_count) {
    std::ostringstream os;
    os << "hadamard_cross_check: " << h.sign_change_count << " sign changes but winding " << h.winding_count;
    throw NumericError(os.str());
  }
  // drop zeros above T introduced by the nudge
  std::vector<double> used;
  for (double g : h.zeros)
    if (g <= T) used.push_back(g);
  const int npts = 9;
  for (int i = 0; i < npts; ++i) {
    const double x = 0.1 + (sigma - 0.6) * i / (npts - 1);
    double p = std::pow(x, h.central_order) * lead;
    for (double g : used) p *= 1 + x * x / (g * g);
    const double e = L.lambda(0.5 + x).real();
    h.sample_points.push_back(x);
    h.product.push_back(p);
    h.exact.push_back(e);
    h.gap = std::max(h.gap, std::abs(p / e - 1));
  }
  return h;
}

// ---- Selberg's lemma

SelbergBox::SelbergBox(double w0, double w1, double h) : W0(w0), W1(w1), H(h) {
  if (!(w0 < w1)) throw DomainError("SelbergBox: need W0 < W1");
  if (!(h > 0)) throw DomainError("SelbergBox: need H > 0");
}

namespace {

// Continuous branch of arg phi along the segment W1 + it, t in [-H, H].
class BranchTracker {
 public:
  BranchTracker(const std::function<cplx(cplx)>& phi, double x, double H) : phi_(phi), x_(x) {
    const int n = 512;
    t_.push_back(-H);
    f_.push_back(phi(cplx(x, -H)));
    arg_.push_back(std::arg(f_.back()));
    for (int i = 1; i <= n; ++i) extend(-H + 2 * H * i / n, 0);
  }
  cplx log_phi(double t) const {
    const auto it = std::lower_bound(t_.begin(), t_.end(), t);
    size_t i = static_cast<size_t>(it - t_.begin());
    if (i == t_.size()) i = t_.size() - 1;
    if (i > 0 && t - t_[i - 1] < t_[i] - t) --i;
    const cplx v = phi_(cplx(x_, t));
    return cplx(std::log(std::abs(v)), arg_[i] + std::arg(v / f_[i]));
  }

 private:
  void extend(double t1, int depth) {
    const double t0 = t_.back();
    const cplx f1 = phi_(cplx(x_, t1));
    const double d = std::arg(f1 / f_.back());
    if (std::abs(d) > kPi / 4) {
      if (depth > 40) throw NumericError("selberg_identity_check: branch tracking step above pi/2 unresolved");
      extend(0.5 * (t0 + t1), depth + 1);
      extend(t1, depth + 1);
      return;
    }
    t_.push_back(t1);
    f_.push_back(f1);
    arg_.push_back(arg_.back() + d);
  }
  const std::function<cplx(cplx)>& phi_;
  double x_;
  std::vector<double> t_, arg_;
  std::vector<cplx> f_;
};

}  // namespace

SelbergResult selberg_identity_check(const std::function<cplx(cplx)>& phi, const std::vector<cplx>& zeros,
                                     const SelbergBox& box) {
  const double W0 = box.W0, W1 = box.W1, H = box.H;
  const double w = kPi / (2 * H);
  SelbergResult r;
  CompensatedSum<> lhs;
  for (const cplx& z : zeros) {
    if (z.real() < W0 || z.real() > W1 || std::abs(z.imag()) > H) continue;
    lhs.add(4 * H * std::cos(w * z.imag()) * std::sinh(w * (z.real() - W0)));
  }
  r.lhs = lhs.value();
  QuadOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-14;
  r.vertical_left =
      integrate([&](double t) { return std::cos(w * t) * std::log(std::abs(phi(cplx(W0, t)))); }, -H, H, o).value;
  r.horizontal = integrate(
                     [&](double a) {
                       return std::sinh(w * (a - W0)) *
                              std::log(std::abs(phi(cplx(a, H))) * std::abs(phi(cplx(a, -H))));
                     },
                     W0, W1, o)
                     .value;
  const BranchTracker br(phi, W1, H);
  r.vertical_right =
      integrate([&](double t) { return (std::cosh(w * cplx(W1 - W0, t)) * br.log_phi(t)).real(); }, -H, H, o)
          .value;
  r.rhs = r.vertical_left + r.horizontal - r.vertical_right;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

}  // namespace superpos
