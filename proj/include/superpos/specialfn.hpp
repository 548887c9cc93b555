#pragma once

#include <cstdint>
#include <vector>

#include "superpos/numerics.hpp"

namespace superpos {

// ---- Gamma

// Analytic continuation of log Gamma (not the principal log of Gamma) from
// the positive real axis; suitable for exp() and for differences.
cplx log_gamma(cplx s);
cplx gamma(cplx s);
// Reciprocal Gamma; entire, so no pole error.
cplx rgamma(cplx s);

// log(sin(pi z)) without overflow for large |Im z|.
cplx log_sin_pi(cplx z);

// ---- Zeta

cplx zeta(cplx s);
// zeta(s) - 1/(s-1), finite at s = 1 (equals Euler's constant there).
cplx zeta_minus_pole(cplx s);

// ---- Incomplete gamma

struct IncompleteGamma {
  double value;       // +inf when it overflows a double
  double log_value;   // always finite for a > 0, x >= 0
};
IncompleteGamma incomplete_gamma_upper(double a, double x);

// log Gamma(a, z) for complex a and z off the negative real axis. Continued
// fraction when |z| is large against |a|, otherwise Gamma(a) - gamma(a, z).
cplx log_incomplete_gamma_upper(cplx a, cplx z);

// ---- Bessel

double bessel_j_integer(int k, double x);
// J_0(x), ..., J_nmax(x) from a single backward recurrence.
std::vector<double> bessel_j_sequence(int nmax, double x);

struct ImagOrderBessel {
  double jplus;   // J^+_{2it}(x) = -pi/sin(pi nu/2) (J_nu - J_{-nu}), nu = 2it
  double kplus;   // K^+_{2it}(x) = 4 cos(pi nu/2) K_nu(x)
};
ImagOrderBessel bessel_imag_order(double t, double x);
// K_{i tau}(x), real for real tau.
double bessel_k_imag(double tau, double x);

// ---- Arithmetic

cplx eta(cplx nu, std::int64_t n);
double kloosterman(std::int64_t m, std::int64_t n, std::int64_t c);

std::int64_t gcd64(std::int64_t a, std::int64_t b);
// inverse of a modulo m, requires gcd(a, m) = 1
std::int64_t inverse_mod(std::int64_t a, std::int64_t m);

// Sieved multiplicative functions up to n_max.
class ArithmeticTable {
 public:
  explicit ArithmeticTable(int n_max);
  int size() const { return n_max_; }
  int mu(int n) const { return mu_.at(n); }
  int tau(int n) const { return tau_.at(n); }
  std::int64_t phi(int n) const { return phi_.at(n); }
  std::int64_t rad(int n) const { return rad_.at(n); }
  int smallest_prime_factor(int n) const { return spf_.at(n); }
  bool is_prime(int n) const { return n >= 2 && spf_.at(n) == n; }
  // (prime, exponent) pairs
  std::vector<std::pair<int, int>> factor(int n) const;
  std::vector<int> divisors(int n) const;
  const std::vector<int>& primes() const { return primes_; }

 private:
  int n_max_;
  std::vector<int> spf_, mu_, tau_, primes_;
  std::vector<std::int64_t> phi_, rad_;
};

// ---- Smooth cutoff H and its Mellin transform

// psi(u) = 1/(1 + exp(2u/(1-u^2))) on (-1,1), 1 for u <= -1, 0 for u >= 1.
double cutoff_psi(double u);
double cutoff_psi_prime(double u);
// H(x) = psi(log2 x); equals 1 on [0,1/2] and 0 on [2,inf).
double cutoff_h(double x);
// Mellin transform of H, meromorphic with a single simple pole at 0.
cplx mellin_h(cplx s);

}  // namespace superpos
