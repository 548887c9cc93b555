#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "superpos/eigenforms.hpp"
#include "superpos/numerics.hpp"

namespace superpos {

struct PeterssonCheck {
  double lhs = 0;       // sum_f omega_f lambda_f(m) lambda_f(n)
  double rhs = 0;       // delta + 2 pi i^{-k} sum_{c <= c_max} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c)
  double residual = 0;
  int c_max = 0;
  double tail_bound = 0;  // sum_{c > c_max} 2 pi (2 pi sqrt(mn)/c)^{k-1}/(k-1)!
};

// c_max = 0 picks the smallest c_max whose tail bound is below 1e-12.
// weights overrides the harmonic weights of hecke_basis(k) (same order).
PeterssonCheck petersson_check(int k, int m, int n, int c_max = 0,
                               const std::vector<double>* weights = nullptr);

struct BesselAverageCheck {
  double lhs = 0;        // 4 sum_{k = 2 (4)} Phi((k-1)/K) J_{k-1}(x)
  double main_term = 0;  // Phi(x/K)
  double oscillatory = 0;  // (K/sqrt x) Im(e^{-2 pi i/8} e^{ix} check Phi(K^2/2x))
  double error = 0;      // |lhs - main - oscillatory|
  double scaled_error = 0;  // error K^3 / (x int |v|^3 |hat Phi|)
  int terms = 0;
};

// Requires K in [20, 200] and x in [K/8, 4K].
BesselAverageCheck bessel_average_check(double K, double x, const SmoothBump& phi = SmoothBump::standard());

// Smooth compactly supported test function for the Voronoi check.
struct VoronoiTestFunction {
  std::function<double(double)> g;
  double lo, hi;  // support
  // exp(-((x-mid)/width)^2) times the standard bump rescaled to [lo, hi]
  static VoronoiTestFunction gaussian_bump(double lo, double hi);
};

struct VoronoiCheck {
  cplx lhs;
  cplx zeta_terms;
  cplx j_sum, k_sum;
  cplx rhs;
  double residual = 0;
  int j_terms = 0, k_terms = 0;
  double last_j_term = 0;  // size of the last dual terms kept (first omitted when capped)
};

// Requires (a, c) = 1, c <= 12, 0.05 <= |t| <= 2 and support inside [1, 40].
// max_dual_terms > 0 cuts the dual sums at n = max_dual_terms.
VoronoiCheck voronoi_check(double t, int a, int c, const VoronoiTestFunction& g, int max_dual_terms = 0);

struct DirichletCheck {
  cplx sum;
  cplx closed_form;
  double residual = 0;
  double tail_bound = 0;
};

// With ell: sum_{d,c} S(0,ell;c)/(c d)^{1+2s} against ell^{-s} eta_s(ell).
// Without: sum_{d,c} phi(c)/(c d)^{1+2s} against zeta(2s).
DirichletCheck dirichlet_identity_check(std::optional<int> ell, cplx s, int c_max = 1000, int d_max = 1000);

}  // namespace superpos
