#pragma once

#include <array>
#include <vector>

#include "superpos/eigenforms.hpp"
#include "superpos/numerics.hpp"

namespace superpos {

// Cubic P with P(0) = P'(0) = P'(upsilon) = 0, P(upsilon) = 1, and the
// constants built from theta and upsilon.
struct MollifierParams {
  double theta = 1e-10;
  double upsilon = 0.64;
  double R = 4;
  // coefficients of 1, x, x^2, x^3; the defaults are those of standard()
  std::array<double, 4> p{0, 0, 3 / (0.64 * 0.64), -2 / (0.64 * 0.64 * 0.64)};

  // P(x) = 3 (x/upsilon)^2 - 2 (x/upsilon)^3
  static MollifierParams standard();
  // Same constraints, general upsilon and theta.
  static MollifierParams with(double upsilon, double theta);

  double S() const;  // pi / (4 (1 - upsilon)(1 - 20 theta))
  double d() const { return 2 * S() / 3; }
  double M_exponent() const { return 1 - 5 * theta; }
  double M(double K) const;

  double P(double x) const;
  double P_prime(double x) const;
  // Q(x) = 1 - P(upsilon + (1 - upsilon) x), as an evaluated identity
  double Q(double x) const;
  // Q expanded into its own coefficient list
  std::array<double, 4> q_coefficients() const;

  // Throws DomainError unless the four constraints on P hold to 1e-12.
  void validate() const;
};

// F(x) = 1 on [0, M^{1-upsilon}], P(log(M/x)/log M) up to M, 0 beyond. Needs M > 10.
double f_cutoff(double x, const MollifierParams& prm, double M);

// The two pieces F = P-part + Q-part used by the short/long range split:
// P(log(M/x)/log M) for x <= M, plus Q(log(y/x)/log y), y = M^{1-upsilon}, for x <= y.
struct CutoffSplit {
  double p_part = 0, q_part = 0;
};
CutoffSplit f_cutoff_split(double x, const MollifierParams& prm, double M);

// x_ell(s) = mu(ell) sum_n mu^2(ell n) F(ell n) / n^{2s}, a finite sum since F(x) = 0 for x >= M.
cplx mollifier_coefficient(int ell, cplx s, const MollifierParams& prm, double M);

// c(n) = sum_{d | n} mu(d) F(d), the coefficients of L M.
double inverse_coefficient(int n, const MollifierParams& prm, double M);

// a_f(n) of 1/L(s, f): mu(m) lambda(m) at n = m k^2 (m, k squarefree, coprime), 0 otherwise.
double inverse_l_coefficient(const HeckeEigenform& f, int n);

// b_f(n) = sum_{l m = n} lambda(m) a_f(l) F(rad l) for n <= N, by direct convolution.
std::vector<double> lm_coefficients(const HeckeEigenform& f, const MollifierParams& prm, double M, int N);

struct MollifierValue {
  double M = 0;
  cplx by_radical;      // sum a_f(n) F(rad n) / n^s
  cplx by_coefficients; // sum x_ell(s) lambda(ell) / ell^s
  double agreement = 0; // |difference|
  int terms = 0;        // nonzero terms of the first sum
};

// M = K^{1 - 5 theta}. Throws InsufficientCoefficients if lambda_f stops short of M.
MollifierValue mollifier_value(const HeckeEigenform& f, cplx s, double K,
                               const MollifierParams& prm = MollifierParams::standard());

// Regions of omega = delta + it. Only case one is carried out here; the
// others are deferred to the Conrey-Soundararajan method.
enum class OmegaCase { one, two, three, none };
struct OmegaConstants {
  double A = 1, B = 1, C = 1, C1 = 1, C2 = 10;
};
OmegaCase classify_omega(double delta, double t, double K, const OmegaConstants& c = {});
// Throws DomainError ("out of scope") for cases two and three and outside all three.
void require_case_one(double delta, double t, double K, const OmegaConstants& c = {});

// The three main terms of the twisted second moment
//   zeta(1+2d) eta_it(l) l^{-1/2-d} (K/4) int Phi
// + zeta(1-2d) eta_it(l) l^{-1/2+d} (K/4pi)^{-4d} (K/4) int Phi u^{-4d}
// - 2 Re{ zeta(1+2it) eta_d(l) l^{-1/2-it} (K/4pi)^{-2d+2it} (K/4) int Phi u^{-2d+2it} }.
// The first two carry opposite poles at d = 0 and the third one at t = 0;
// merged12 and term3 are evaluated in forms that stay finite there.
struct TwistedMain {
  double term1 = 0, term2 = 0;  // +-inf at delta = 0
  double merged12 = 0;
  double term3 = 0;
  double total = 0;             // merged12 + term3
};

// Requires ell <= K^{1.96}, -1/log K <= delta <= 1/2, |t| <= K^{1/200}.
TwistedMain twisted_moment_main(int ell, double delta, double t, double K,
                                const SmoothBump& phi = SmoothBump::standard());

// sum_{k = 2 (4)} Phi((k-1)/K) sum_f omega_f lambda_f(ell) |L(1/2+delta+it, f)|^2,
// from the approximate functional equation. K <= 40.
double twisted_moment_lhs(int ell, double delta, double t, double K,
                          const SmoothBump& phi = SmoothBump::standard());

struct TwistedMoment {
  double lhs = 0;
  TwistedMain main;
  double ratio = 0;  // lhs / main.total
};
TwistedMoment twisted_moment(int ell, double delta, double t, double K,
                             const SmoothBump& phi = SmoothBump::standard());

struct EulerProductT {
  cplx double_sum;      // sum_l nu(l)/l^{1+s+z} sum_n mu^2(l n r) mu(l r)/n^{1+s+2z}, l n <= X
  double sum_tail = 0;  // bound on the omitted l n > X
  cplx closed_form;     // mu(r) G zeta(1+s+2z) / (zeta(1+s+z+alpha) zeta(1+s+z+beta)), G over p <= P
  double closed_tail = 0;
  double residual = 0;
};

// nu(l) = eta_{(alpha-beta)/2}(l) / l^{(alpha+beta)/2}. Needs both series to
// converge absolutely: Re(1+s+z) - max(0, -Re alpha, -Re beta) > 1 and Re(1+s+2z) > 1.
EulerProductT euler_product_T(cplx alpha, cplx beta, cplx s, int r, cplx z, int X = 1 << 20,
                              int P = 20000);

}  // namespace superpos
