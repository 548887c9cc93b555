#pragma once

#include <functional>
#include <string>
#include <vector>

#include "superpos/lfunction.hpp"
#include "superpos/numerics.hpp"

namespace superpos {

// {sigma + it : 1/2 < sigma < 1, |t| <= sigma - 1/2}, covered by the disk
// |s - 1/2| <= rho and the rectangle [1/2 + rho/sqrt2, 1] x [-1/2, 1/2].
struct TriangleRegion {
  double rho;
  explicit TriangleRegion(double rho);
  double rect_left() const;
  bool in_triangle(cplx s) const;
  bool in_disk(cplx s) const { return std::abs(s - 0.5) <= rho; }
  bool in_rect(cplx s) const;
  // Polygon circumscribing the disk, so it covers the disk itself.
  Contour disk_contour(int sides = 64) const;
  Contour rect_contour() const;
};

enum class Verdict { certified, not_certified, failed };
const char* to_string(Verdict v);

struct ZeroCertificate {
  std::string form_id;
  int weight = 0;
  int epsilon = 0;
  double rho = 0;
  int central_order = -1;
  int disk_winding = 0;
  int rect_winding = 0;
  // min|phi| / max|phi| on each contour; certification needs > 0.05. phi is
  // Lambda with the located critical-line zeros divided out (and, on the
  // rectangle, (s-1/2)^m): those zeros are off the open triangle but sit
  // within rho of the contours and would otherwise dominate the margins.
  double disk_margin = 0;
  double rect_margin = 0;
  double rect_margin_undeflated = 0;  // same ratio for Lambda itself
  double disk_raw = 0, rect_raw = 0;  // unrounded winding counts
  std::vector<double> line_zeros;     // deflated ordinates gamma > 0 (and -gamma)
  long evaluations = 0;
  std::vector<double> central_derivatives;  // Lambda^{(j)}(1/2), j <= max order
  Verdict verdict = Verdict::failed;
  std::string reason;
};

inline constexpr double kMarginThreshold = 0.05;
inline constexpr double kNonzeroThreshold = 1e-8;  // relative to the Cauchy bound
inline constexpr double kZeroThreshold = 1e-12;

// Classification of a derivative against its Cauchy bound j! M_r / r^j.
enum class DerivativeSign { negative = -1, zero = 0, positive = 1, indeterminate = 2 };
DerivativeSign classify_derivative(double value, double cauchy_bound);

// First order with a nonzero derivative, only looking at the parity allowed
// by epsilon. Returns -1 when a candidate is indeterminate or none is nonzero.
int central_order(const DerivativeTable& d, int epsilon, std::string* why = nullptr);

// Ordinates in (t0, t1] where the real function Lambda(1/2+it) (eps = 1) or
// -i Lambda(1/2+it) (eps = -1) changes sign, bisected to 1e-9. Each is a
// zero exactly on the critical line.
std::vector<double> critical_line_zeros(const CompletedLFunction& L, double t0, double t1, double step = 0.02);

// Winding-number certificate for an arbitrary phi with a given central order.
// line_zeros are known zeros 1/2 +- i gamma of phi, divided out before counting.
ZeroCertificate certify_region(const std::function<cplx(cplx)>& phi, int central_order, double rho,
                               const std::string& id, const std::vector<double>& line_zeros = {});
ZeroCertificate certify_triangle(const CompletedLFunction& L, double rho = 0.02, int max_order = 12);

struct SuperpositivityReport {
  int max_order = 0;
  int k0 = -1;
  std::vector<double> central;              // Lambda^{(j)}(1/2)
  std::vector<DerivativeSign> central_sign;
  std::vector<double> sigmas;               // clause (2) abscissae
  std::vector<std::vector<double>> off_center;  // [sigma][j]
  std::vector<std::vector<DerivativeSign>> off_center_sign;
  bool clause1 = false, clause2 = false, clause3 = false;
  bool holds() const { return clause1 && clause2 && clause3; }
};

SuperpositivityReport superpositivity_report(const CompletedLFunction& L, int max_order);

struct HadamardCheck {
  int central_order = 0;
  double log_scale = 0;           // A, with e^A = Lambda^{(m)}(1/2)/m!
  std::vector<double> zeros;      // ordinates on the critical line in (t0, T]
  int sign_change_count = 0;
  int winding_count = 0;
  double t0 = 0.05, top = 0;      // box used for the winding count
  std::vector<double> sample_points;  // sigma' with s = 1/2 + sigma'
  std::vector<double> product, exact;
  double gap = 0;                 // max |product/exact - 1|
};

// Truncated product s^m e^A prod (1 + s^2/gamma^2) over critical-line zeros
// up to T, compared with Lambda(1/2 + sigma') for sigma' in [0.1, sigma - 1/2].
HadamardCheck hadamard_cross_check(const CompletedLFunction& L, double T, double sigma = 1.0);

struct SelbergBox {
  double W0, W1, H;
  SelbergBox(double w0, double w1, double h);
};

struct SelbergResult {
  double lhs = 0;
  double vertical_left = 0;  // int cos(pi t/2H) log|phi(W0+it)| dt
  double horizontal = 0;     // int sinh(pi(a-W0)/2H) log|phi(a+iH)phi(a-iH)| da
  double vertical_right = 0; // Re int cosh(pi(W1-W0+it)/2H) log phi(W1+it) dt
  double rhs = 0;
  double residual = 0;
};

// Selberg's argument-principle identity for phi on the box, with the zero
// list supplying the left side. log phi on the right edge follows a
// continuous branch; a phase step that cannot be brought under pi/2 throws.
SelbergResult selberg_identity_check(const std::function<cplx(cplx)>& phi, const std::vector<cplx>& zeros,
                                     const SelbergBox& box);

}  // namespace superpos
