#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

#include "superpos/numerics.hpp"

namespace superpos {

// Truncated q-series with exact integer coefficients a[0..N].
struct QExpansion {
  int weight = 0;
  std::vector<mpz_class> a;

  int precision() const { return static_cast<int>(a.size()) - 1; }
  const mpz_class& operator[](int n) const { return a.at(n); }
};

// Product truncated at q^N (Kronecker substitution, so GMP's fast
// multiplication does the convolution).
QExpansion series_mul(const QExpansion& f, const QExpansion& g, int N);
QExpansion series_pow(const QExpansion& f, int e, int N);
QExpansion series_sub(const QExpansion& f, const QExpansion& g);

QExpansion eisenstein(int k, int N);  // k = 4 or 6, constant term 1
QExpansion delta(int N);              // (E4^3 - E6^2)/1728
QExpansion delta_product(int N);      // q prod (1-q^n)^24 via Jacobi's identity

int dim_cusp_forms(int k);

// Echelonized basis f_j = q^j + O(q^{d+1}), j = 1..d.
std::vector<QExpansion> victor_miller_basis(int k, int N);

using IntMatrix = std::vector<std::vector<mpz_class>>;
// Matrix of T_p on the echelon basis: column j holds the first d coefficients
// of T_p f_j. Needs basis precision >= p*d.
IntMatrix hecke_matrix(const std::vector<QExpansion>& basis, int p);
// Characteristic polynomial coefficients c_0..c_d (monic, c_d = 1).
std::vector<mpz_class> charpoly(const IntMatrix& m);

struct HeckeEigenform {
  int k = 0;
  int index = 0;              // position within the space, sorted by lambda(2)
  int epsilon = 1;            // (-1)^{k/2}
  std::vector<double> lambda; // lambda[n] for 1 <= n <= N; lambda[0] = 0
  double omega = 0;           // harmonic weight
  double omega_residual = 0;  // fit residual of the Petersson system
  std::string provenance;     // "exact-integer" (dim 1) or "numeric-diagonalization"

  int max_n() const { return static_cast<int>(lambda.size()) - 1; }
  double l1_sym2() const;     // 12 zeta(2) / ((k-1) omega)
};

// Hecke eigenbasis of S_k with lambda(n) for n <= N, sorted by lambda(2).
// Results are cached per (k, N) for the lifetime of the process.
std::vector<HeckeEigenform> hecke_basis(int k, int N);

// delta_{m,n} + 2 pi i^{-k} sum_c S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c), the
// c-sum stopped once the Weil-bound tail is below tail_tol (or at c_max when
// c_max > 0). The tail bound actually achieved is written to *tail.
double petersson_rhs(int k, int m, int n, int c_max = 0, double tail_tol = 1e-17,
                     double* tail = nullptr);

// Harmonic weights of a whole space from the Petersson formula: dimension 1
// uses (m,n) = (1,1); otherwise least squares over (1,n), n<=d, and (2,n),
// 2<=n<=d+1. Throws NumericError on ill-conditioning (condition number in
// the message).
std::vector<double> harmonic_weights(int k, const std::vector<HeckeEigenform>& forms,
                                     double* residual = nullptr, double* condition = nullptr);
double harmonic_weight(const HeckeEigenform& f);

// All forms with K <= k <= 2K in one residue class mod 4 (2 for the odd
// family, 0 for the even one).
std::vector<HeckeEigenform> harmonic_family(double K, int residue_mod4, int N);

}  // namespace superpos
