#pragma once

#include <memory>
#include <vector>

#include "superpos/eigenforms.hpp"
#include "superpos/errors.hpp"
#include "superpos/numerics.hpp"

namespace superpos {

// Raised when a form carries too few lambda(n) for a requested evaluation.
struct InsufficientCoefficients : NumericError {
  int required;
  InsufficientCoefficients(const std::string& msg, int req) : NumericError(msg), required(req) {}
};

// Lambda(s,f) = (2 pi)^{-s'} Gamma(s') L(s,f), s' = s + (k-1)/2, evaluated by
// the incomplete-gamma splitting of the Mellin integral at a split point
// A = exp(i phi). phi follows the saddle direction arg s' of the dominant
// term, limited so that Re(2 pi A) >= 2 pi rotation_budget/|Im s|; the
// terms then exceed |Lambda| by at most about e^{rotation_budget}.
class CompletedLFunction {
 public:
  explicit CompletedLFunction(HeckeEigenform f, double tail_rel_tol = 1e-16,
                              double rotation_budget = 8.0);

  const HeckeEigenform& form() const { return *f_; }
  int weight() const { return f_->k; }
  int epsilon() const { return f_->epsilon; }

  cplx lambda(cplx s) const;
  // Same, also reporting the number of terms the tail bound required.
  cplx lambda(cplx s, int* terms) const;
  cplx gamma_factor(cplx s) const;
  cplx l_value(cplx s) const { return lambda(s) / gamma_factor(s); }
  // Series length needed at s (may exceed the stored coefficients).
  int required_terms(cplx s) const;

 private:
  std::shared_ptr<const HeckeEigenform> f_;
  double tol_, budget_;
};

// Convenience: the index-th eigenform of weight k with enough coefficients
// for central evaluations.
CompletedLFunction make_lfunction(int k, int index = 0, int num_coeffs = 400);

struct DerivativeTable {
  cplx center;
  std::vector<cplx> value;            // Lambda^{(j)}(center), j = 0..max_order
  std::vector<double> error_estimate; // max(radius disagreement, noise floor)
  std::vector<double> radius;         // Cauchy radius used for order j
  std::vector<double> noise;          // roundoff floor eps * j! M_r / r^j
};

// Cauchy-circle derivatives with 256 nodes. Each order uses the radius
// from a doubling ladder that minimizes the roundoff floor and is checked
// against the next-best radius; disagreement beyond 1e-8 relative (or the
// joint noise floor) throws NumericError.
DerivativeTable lambda_derivatives(const CompletedLFunction& L, cplx center, int max_order,
                                   int nodes = 256);

// V_{k,delta+it}(y) of the approximate functional equation for
// |L(1/2+delta+it)|^2, evaluated along Re s = |delta| + 1 with the
// trapezoid rule (exponentially accurate for this analytic integrand).
// The node table depends only on (k, delta, t) and is built once.
class AfeWeight {
 public:
  AfeWeight(int k, double delta, double t, double step = 0.1);
  double operator()(double y) const { return value(y); }
  double value(double y, double* imag_residue = nullptr) const;
  double y_derivative(double y) const;  // y V'(y)
  // Residue-theorem leading terms 1 + (4 pi^2 y)^{2 delta} Gamma ratio.
  double leading_terms(double y) const;
  int k() const { return k_; }
  double delta() const { return delta_; }
  double t() const { return t_; }
  int nodes() const { return static_cast<int>(T_.size()); }

 private:
  int k_;
  double delta_, t_, c_;
  std::vector<double> T_;
  std::vector<cplx> A_;
};

double afe_weight(int k, double delta, double t, double y);
// Independent route: V as the Mellin convolution of x^{+-delta} H(x) with
// 2 x^{k/2} K_{2it}(2 sqrt x), as a 2D quadrature. Slow; used as an oracle.
double afe_weight_real_space(int k, double delta, double t, double y);

struct AfeSum {
  double value = 0;
  int y_max = 0;        // largest n d^2 used
  long terms = 0;       // (n,d) pairs summed
  double v_at_cutoff = 0;
};
// sum_d d^{-1-2delta} sum_n lambda(n) eta_{it}(n) n^{-1/2-delta} V(n d^2),
// cut past the bulk where |V| < 1e-15 max|V| (never beyond n d^2 = 40 k^2).
AfeSum l_squared_afe(const HeckeEigenform& f, double delta, double t);
AfeSum l_squared_afe(const HeckeEigenform& f, const AfeWeight& V);

}  // namespace superpos
