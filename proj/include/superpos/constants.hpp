#pragma once

#include <string>
#include <vector>

#include "superpos/mollifier.hpp"

namespace superpos {

// How script_v treats the removable singularities at u = 0 and v = 0.
//   automatic: merged forms when |u| < 1e-4 or |v| < 1e-4, displayed forms otherwise
//   displayed: always the term-by-term definitions (singular at u = 0 or v = 0)
//   merged:    always the combined forms
enum class VForm { automatic, displayed, merged };

// V(u, v) = V1 + V2 + V3, the limit of the averaged |L M(1/2 + (u + iv)/log K)|^2.
// When the u = 0 merge is active, the two 1/u pieces (V1 - 1 and the first
// integral of V2) are carried together inside v1, and v2 holds the rest.
struct ScriptV {
  double v1 = 0, v2 = 0, v3 = 0;
  double v31 = 0, v32 = 0;  // v3 = v31 + v32, the split used for the large-u bound
  double minus_one = 0;     // V - 1, kept separately so that log V survives V -> 1
  double value = 0;
  bool merged_u = false, merged_v = false;
};

// Needs |u|, |v| <= 300 and (u, v) != (0, 0). NumericError if V overflows.
ScriptV script_v(double u, double v, const MollifierParams& prm = MollifierParams::standard(),
                 VForm form = VForm::automatic);

// |Im(Z(u,v) + Z(u,-v))| over the complex brackets Z that enter V through
// 2 Re{Z}, relative to max(1, |Z|). Zero when the brackets are conjugate-symmetric in v.
double script_v_conjugate_residue(double u, double v,
                                  const MollifierParams& prm = MollifierParams::standard());

// Pointwise check of V <= 1 + e^{-u/2}, V1 <= 1 + e^{-u/2}/2, V2 <= e^{-4u},
// V3 <= e^{-2u} and |V31|, |V32| <= e^{-2u}/2 on an nu x nv grid with
// u in [u0, u1] and v in [-5u, 5u]. Slack is (bound - value) / bound.
struct LemmaScan {
  double worst_slack = 0;
  double worst_u = 0, worst_v = 0;
  std::string worst_inequality;
  int violations = 0;
  int points = 0;
};
LemmaScan lemma_vl_scan(const MollifierParams& prm = MollifierParams::standard(), int nu = 40, int nv = 40,
                        double u0 = 10, double u1 = 60);

struct ConstantsOptions {
  double tol = 1e-10;        // relative tolerance of the outer t and u integrals
  double inner_tol = 1e-13;  // relative tolerance of the x integrals inside V
  double cutoff = 400;       // U for the semi-infinite u integrals, in [50, 450]
};

// A bound with the pieces it was assembled from. The O((log K)^{-c}) term
// is dropped: these are the K -> infinity constants.
struct BoundValue {
  double value = 0;
  double t_integral = 0, u_integral = 0;
  double error_estimate = 0;  // quadrature error, already divided by the prefactor
  double tail = 0;            // modeled u > U contribution, included in value
};

// (int_0^S cos(pi t/2S) log V(-R, t) dt + int_0^inf sinh(pi u/2S) log V(u - R, S) du)
//   / (8 S sinh(pi R/2S)) - 1/2
BoundValue n0_bound(const MollifierParams& prm = MollifierParams::standard(), const ConstantsOptions& opt = {});

// [int_0^{3(j+1)d/2} cos(pi t/(3(j+1)d)) log V(jd/2, t) dt
//  + int_0^inf sinh(pi u/(3(j+1)d)) log V(u + jd/2, 3(j+1)d/2) du] / (6(j+1)d sinh(pi j/(6(j+1))))
// for 1 <= j <= 40, d = 2S/3.
BoundValue nj_bound(int j, const MollifierParams& prm = MollifierParams::standard(),
                    const ConstantsOptions& opt = {});

struct ConstantsReport {
  BoundValue n0;
  std::vector<BoundValue> nj;  // j = 1..13 at index j - 1
  double sum_4_13 = 0;
  double tail = 0;             // (3/5) e^{-14d/4} / (1 - e^{-d/4}), for j >= 14
  double hough = 0;            // the j = J term, O((log K)^{-c})
  bool hough_asymptotic = true;
  double total = 0;            // n0 + sum nj + tail
  double proportion = 0;       // 1 - total
  double error_estimate = 0;   // summed quadrature errors
};

double closed_form_tail(const MollifierParams& prm = MollifierParams::standard());

// Per-j bounds run in parallel.
ConstantsReport tail_and_total(const MollifierParams& prm = MollifierParams::standard(),
                               const ConstantsOptions& opt = {});

}  // namespace superpos
