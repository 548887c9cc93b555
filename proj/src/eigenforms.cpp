#include "superpos/eigenforms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "superpos/specialfn.hpp"

namespace superpos {

namespace {

constexpr int kLimbBits = 64;
static_assert(sizeof(mp_limb_t) * 8 == kLimbBits, "64-bit limbs expected");

size_t max_bits(const std::vector<mpz_class>& v, int n) {
  size_t b = 0;
  for (int i = 0; i < n; ++i)
    if (sgn(v[i]) != 0) b = std::max(b, mpz_sizeinbase(v[i].get_mpz_t(), 2));
  return b;
}

// sum_i c_i 2^{64 L i} as a signed big integer
mpz_class kronecker_pack(const std::vector<mpz_class>& c, int n, size_t L) {
  std::vector<mp_limb_t> pos(n * L + 1, 0), neg(n * L + 1, 0);
  for (int i = 0; i < n; ++i) {
    const int s = sgn(c[i]);
    if (s == 0) continue;
    size_t count = 0;
    mp_limb_t* dst = (s > 0 ? pos.data() : neg.data()) + i * L;
    mpz_export(dst, &count, -1, sizeof(mp_limb_t), 0, 0, c[i].get_mpz_t());
  }
  mpz_class P, N;
  mpz_import(P.get_mpz_t(), pos.size(), -1, sizeof(mp_limb_t), 0, 0, pos.data());
  mpz_import(N.get_mpz_t(), neg.size(), -1, sizeof(mp_limb_t), 0, 0, neg.data());
  return P - N;
}

// Inverse of kronecker_pack for balanced digits |c_i| < 2^{64L-1}.
std::vector<mpz_class> kronecker_unpack(const mpz_class& X, int n, size_t L) {
  std::vector<mpz_class> out(n);
  const int sign = sgn(X);
  if (sign == 0) return out;
  mpz_class A = abs(X);
  const size_t nl = mpz_size(A.get_mpz_t());
  std::vector<mp_limb_t> limbs(std::max(nl, n * L) + L, 0);
  size_t count = 0;
  mpz_export(limbs.data(), &count, -1, sizeof(mp_limb_t), 0, 0, A.get_mpz_t());
  mpz_class half, full;
  mpz_ui_pow_ui(full.get_mpz_t(), 2, kLimbBits * L);
  half = full / 2;
  int carry = 0;
  for (int i = 0; i < n; ++i) {
    mpz_class u;
    mpz_import(u.get_mpz_t(), L, -1, sizeof(mp_limb_t), 0, 0, limbs.data() + i * L);
    u += carry;
    if (u >= half) {
      u -= full;
      carry = 1;
    } else {
      carry = 0;
    }
    out[i] = sign > 0 ? u : mpz_class(-u);
  }
  return out;
}

}  // namespace

QExpansion series_mul(const QExpansion& f, const QExpansion& g, int N) {
  const int nf = std::min(f.precision(), N) + 1, ng = std::min(g.precision(), N) + 1;
  if (nf <= 0 || ng <= 0) throw DomainError("series_mul: empty series");
  const int nout = std::min(N, nf + ng - 2) + 1;
  const size_t bits = max_bits(f.a, nf) + max_bits(g.a, ng) +
                      static_cast<size_t>(std::ceil(std::log2(std::min(nf, ng) + 1.0))) + 2;
  const size_t L = bits / kLimbBits + 1;
  const mpz_class X = kronecker_pack(f.a, nf, L) * kronecker_pack(g.a, ng, L);
  QExpansion h;
  h.weight = f.weight + g.weight;
  h.a = kronecker_unpack(X, nout, L);
  h.a.resize(N + 1 > nout ? nout : N + 1);
  return h;
}

QExpansion series_pow(const QExpansion& f, int e, int N) {
  if (e < 0) throw DomainError("series_pow: negative exponent");
  QExpansion result;
  result.weight = 0;
  result.a.assign(N + 1, 0);
  result.a[0] = 1;
  QExpansion base = f;
  base.a.resize(std::min<size_t>(base.a.size(), N + 1));
  while (e > 0) {
    if (e & 1) result = series_mul(result, base, N);
    e >>= 1;
    if (e) base = series_mul(base, base, N);
  }
  return result;
}

QExpansion series_sub(const QExpansion& f, const QExpansion& g) {
  if (f.weight != g.weight) throw DomainError("series_sub: weights differ");
  QExpansion h;
  h.weight = f.weight;
  const size_t n = std::min(f.a.size(), g.a.size());
  h.a.resize(n);
  for (size_t i = 0; i < n; ++i) h.a[i] = f.a[i] - g.a[i];
  return h;
}

QExpansion eisenstein(int k, int N) {
  if (k != 4 && k != 6) throw DomainError("eisenstein: only weights 4 and 6");
  if (N < 0) throw DomainError("eisenstein: negative precision");
  QExpansion e;
  e.weight = k;
  e.a.assign(N + 1, 0);
  e.a[0] = 1;
  const int c = (k == 4) ? 240 : -504;
  const unsigned long pw = k - 1;
  // sigma_{k-1}(n) by a divisor sieve
  for (int d = 1; d <= N; ++d) {
    mpz_class dk;
    mpz_ui_pow_ui(dk.get_mpz_t(), d, pw);
    for (int n = d; n <= N; n += d) e.a[n] += dk;
  }
  for (int n = 1; n <= N; ++n) e.a[n] *= c;
  return e;
}

QExpansion delta(int N) {
  const auto e4 = eisenstein(4, N), e6 = eisenstein(6, N);
  auto d = series_sub(series_pow(e4, 3, N), series_pow(e6, 2, N));
  d.weight = 12;
  for (auto& c : d.a) {
    if (!mpz_divisible_ui_p(c.get_mpz_t(), 1728)) throw NumericError("delta: non-integral");
    c /= 1728;
  }
  return d;
}

// prod (1-q^n)^3 = sum_{m>=0} (-1)^m (2m+1) q^{m(m+1)/2}, then the 8th power.
QExpansion delta_product(int N) {
  QExpansion j3;
  j3.weight = 0;
  j3.a.assign(N + 1, 0);
  for (long m = 0; m * (m + 1) / 2 <= N; ++m) j3.a[m * (m + 1) / 2] = (m % 2 ? -1 : 1) * (2 * m + 1);
  auto p24 = series_pow(j3, 8, N);
  QExpansion d;
  d.weight = 12;
  d.a.assign(N + 1, 0);
  for (int n = 1; n <= N; ++n) d.a[n] = p24.a[n - 1];
  return d;
}

int dim_cusp_forms(int k) {
  if (k < 0 || k % 2) return 0;
  if (k == 2) return 0;
  return k / 12 - (k % 12 == 2 ? 1 : 0);
}

std::vector<QExpansion> victor_miller_basis(int k, int N) {
  const int d = dim_cusp_forms(k);
  if (d == 0) return {};
  static const int a4_tab[12] = {0, 0, 2, 0, 1, 0, 0, 0, 2, 0, 1, 0};
  static const int a6_tab[12] = {0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0};
  const int a4 = a4_tab[k % 12], a6 = a6_tab[k % 12];
  if (12 * d + 4 * a4 + 6 * a6 != k) throw NumericError("victor_miller_basis: weight bookkeeping");
  const auto e4 = eisenstein(4, N), e6 = eisenstein(6, N), dl = delta(N);
  const auto e6sq = series_mul(e6, e6, N);
  QExpansion tail = series_mul(series_pow(e4, a4, N), series_pow(e6, a6, N), N);
  // g_j = Delta^j E6^{2(d-j)} E4^a4 E6^a6
  std::vector<QExpansion> dpow(d + 1), e6pow(d + 1);
  dpow[0] = series_pow(dl, 0, N);
  e6pow[0] = dpow[0];
  for (int j = 1; j <= d; ++j) {
    dpow[j] = series_mul(dpow[j - 1], dl, N);
    e6pow[j] = series_mul(e6pow[j - 1], e6sq, N);
  }
  std::vector<QExpansion> g(d);
  for (int j = 1; j <= d; ++j) {
    g[j - 1] = series_mul(series_mul(dpow[j], e6pow[d - j], N), tail, N);
    g[j - 1].weight = k;
  }
  // unipotent leading block: clear coefficient i in g_j for i > j, j = 1..d
  for (int j = d; j >= 1; --j) {
    for (int i = j + 1; i <= d; ++i) {
      const mpz_class c = g[j - 1].a[i];
      if (sgn(c) == 0) continue;
      for (int n = 0; n <= N; ++n) g[j - 1].a[n] -= c * g[i - 1].a[n];
    }
  }
  for (int j = 1; j <= d; ++j)
    for (int i = 1; i <= d; ++i)
      if (g[j - 1].a[i] != (i == j ? 1 : 0)) throw NumericError("victor_miller_basis: echelon failure");
  return g;
}

IntMatrix hecke_matrix(const std::vector<QExpansion>& basis, int p) {
  const int d = static_cast<int>(basis.size());
  if (d == 0) return {};
  const int k = basis[0].weight;
  if (basis[0].precision() < p * d) throw DomainError("hecke_matrix: basis precision too small");
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p, k - 1);
  IntMatrix m(d, std::vector<mpz_class>(d));
  for (int j = 0; j < d; ++j) {
    for (int i = 1; i <= d; ++i) {
      mpz_class v = basis[j].a[p * i];
      if (i % p == 0) v += pk * basis[j].a[i / p];
      m[i - 1][j] = v;
    }
  }
  return m;
}

// Faddeev-LeVerrier; all quantities stay integral for an integer matrix.
std::vector<mpz_class> charpoly(const IntMatrix& A) {
  const int d = static_cast<int>(A.size());
  std::vector<mpz_class> c(d + 1);
  c[d] = 1;
  IntMatrix M(d, std::vector<mpz_class>(d, 0));
  for (int kk = 1; kk <= d; ++kk) {
    // M <- A M + c_{d-kk+1} I
    IntMatrix AM(d, std::vector<mpz_class>(d, 0));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        mpz_class s = 0;
        for (int l = 0; l < d; ++l) s += A[i][l] * M[l][j];
        AM[i][j] = s;
      }
    for (int i = 0; i < d; ++i) AM[i][i] += c[d - kk + 1];
    M = AM;
    mpz_class tr = 0;
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l) tr += A[i][l] * M[l][i];
    if (!mpz_divisible_ui_p(tr.get_mpz_t(), kk)) throw NumericError("charpoly: non-integral step");
    c[d - kk] = -tr / kk;
  }
  return c;
}

double HeckeEigenform::l1_sym2() const { return 2 * kPi * kPi / ((k - 1) * omega); }

namespace {

constexpr int kPrecBits = 1536;

mpf_class eval_poly(const std::vector<mpz_class>& c, const mpf_class& x, mpf_class* deriv) {
  mpf_class p(0, kPrecBits), dp(0, kPrecBits);
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
    dp = dp * x + p;
    p = p * x + mpf_class(c[i], kPrecBits);
  }
  *deriv = dp;
  return p;
}

// Real roots of the (real-rooted) characteristic polynomial, largest first.
// Newton-Maehly started above the Deligne bound 2^{(k+1)/2} converges
// monotonically to the next root below, with earlier roots divided out
// implicitly.
std::vector<mpf_class> hecke_eigenvalues(int k, const std::vector<mpz_class>& cp) {
  const int d = static_cast<int>(cp.size()) - 1;
  mpf_class start(1, kPrecBits);
  mpf_mul_2exp(start.get_mpf_t(), start.get_mpf_t(), (k + 1) / 2 + 1);
  std::vector<mpf_class> roots;
  for (int r = 0; r < d; ++r) {
    mpf_class x(start, kPrecBits), dp(0, kPrecBits);
    bool done = false;
    for (int it = 0; it < 4000 && !done; ++it) {
      const mpf_class p = eval_poly(cp, x, &dp);
      if (sgn(p) == 0) break;
      mpf_class corr(0, kPrecBits);
      for (const auto& z : roots) corr += 1 / (x - z);
      const mpf_class den = dp - p * corr;
      if (sgn(den) == 0) break;
      const mpf_class step = p / den;
      x -= step;
      mpf_class floor_(abs(x) + 1, kPrecBits);
      mpf_div_2exp(floor_.get_mpf_t(), floor_.get_mpf_t(), 1400);
      if (abs(step) <= floor_) done = true;
    }
    mpf_class dummy(0, kPrecBits);
    if (!done && sgn(eval_poly(cp, x, &dummy)) != 0)
      throw NumericError("hecke_basis: Newton iteration for a T2 eigenvalue did not converge");
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  for (int i = 1; i < d; ++i) {
    const double a = roots[i - 1].get_d(), b = roots[i].get_d();
    if (std::abs(b - a) <= 1e-6 * std::max(std::abs(a), std::abs(b)))
      throw NumericError("hecke_basis: repeated T2 eigenvalue");
  }
  // trace check: sum of roots equals -c_{d-1} exactly in the limit
  mpf_class tr(0, kPrecBits);
  for (auto& r : roots) tr += r;
  mpf_class err = abs(tr + mpf_class(cp[d - 1], kPrecBits));
  if (err.get_d() > 1e-100 * (1 + std::abs(tr.get_d())))
    throw NumericError("hecke_basis: eigenvalue trace mismatch");
  return roots;
}

// Solve (B - lambda I) v = 0 with v_1 = 1 by pivoted elimination in mpf.
std::vector<mpf_class> eigenvector(const IntMatrix& B, const mpf_class& lam) {
  const int d = static_cast<int>(B.size());
  std::vector<mpf_class> v(d, mpf_class(0, kPrecBits));
  v[0] = 1;
  if (d == 1) return v;
  // unknowns v_2..v_d; rows: all d equations
  std::vector<std::vector<mpf_class>> M(d, std::vector<mpf_class>(d, mpf_class(0, kPrecBits)));
  for (int i = 0; i < d; ++i) {
    for (int j = 1; j < d; ++j) {
      M[i][j - 1] = mpf_class(B[i][j], kPrecBits);
      if (i == j) M[i][j - 1] -= lam;
    }
    mpf_class b0(B[i][0], kPrecBits);
    if (i == 0) b0 -= lam;
    M[i][d - 1] = -b0;
  }
  const int n = d - 1;
  std::vector<int> rows(d);
  for (int i = 0; i < d; ++i) rows[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < d; ++r)
      if (abs(M[rows[r]][col]) > abs(M[rows[best]][col])) best = r;
    std::swap(rows[col], rows[best]);
    const auto& piv = M[rows[col]];
    if (sgn(piv[col]) == 0) throw NumericError("hecke_basis: singular eigenvector system");
    for (int r = col + 1; r < d; ++r) {
      mpf_class f = M[rows[r]][col] / piv[col];
      if (sgn(f) == 0) continue;
      for (int c = col; c <= n; ++c) M[rows[r]][c] -= f * piv[c];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    mpf_class s = M[rows[col]][n];
    for (int c = col + 1; c < n; ++c) s -= M[rows[col]][c] * v[c + 1];
    v[col + 1] = s / M[rows[col]][col];
  }
  return v;
}

std::vector<HeckeEigenform> build_space(int k, int N) {
  const int d = dim_cusp_forms(k);
  if (d == 0) return {};
  const int prec = std::max(N, 3 * d + 3);
  const auto basis = victor_miller_basis(k, prec);
  const auto B = hecke_matrix(basis, 2);
  const auto cp = charpoly(B);
  const auto roots = hecke_eigenvalues(k, cp);

  std::vector<HeckeEigenform> forms;
  for (int r = 0; r < d; ++r) {
    const auto v = eigenvector(B, roots[r]);
    HeckeEigenform f;
    f.k = k;
    f.index = r;
    f.epsilon = (k % 4 == 0) ? 1 : -1;
    f.provenance = d == 1 ? "exact-integer" : "numeric-diagonalization";
    f.lambda.assign(N + 1, 0.0);
    for (int n = 1; n <= N; ++n) {
      mpf_class a(0, kPrecBits);
      for (int j = 0; j < d; ++j) a += v[j] * mpf_class(basis[j].a[n], kPrecBits);
      // divide by n^{(k-1)/2}
      mpz_class nk;
      mpz_ui_pow_ui(nk.get_mpz_t(), n, k - 1);
      mpf_class s(nk, kPrecBits);
      s = sqrt(s);
      f.lambda[n] = mpf_class(a / s).get_d();
    }
    forms.push_back(std::move(f));
  }
  std::sort(forms.begin(), forms.end(), [](const HeckeEigenform& a, const HeckeEigenform& b) {
    return a.lambda.size() > 2 ? a.lambda[2] < b.lambda[2] : a.index < b.index;
  });
  for (int i = 0; i < d; ++i) forms[i].index = i;
  double res = 0;
  const auto w = harmonic_weights(k, forms, &res);
  for (int i = 0; i < d; ++i) {
    forms[i].omega = w[i];
    forms[i].omega_residual = res;
  }
  return forms;
}

}  // namespace

std::vector<HeckeEigenform> hecke_basis(int k, int N) {
  if (k < 12 || k % 2 || k > 130) throw DomainError("hecke_basis: weight must be even, 12..130");
  const int d = dim_cusp_forms(k);
  // harmonic weights need lambda up to d+1
  if (N < 2 * d + 2) N = 2 * d + 2;
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const std::vector<HeckeEigenform>>> cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    // any cached space with at least N coefficients will do
    for (auto it = cache.lower_bound({k, N}); it != cache.end() && it->first.first == k; ++it) {
      std::vector<HeckeEigenform> out = *it->second;
      for (auto& f : out) f.lambda.resize(N + 1);
      return out;
    }
  }
  auto built = std::make_shared<const std::vector<HeckeEigenform>>(build_space(k, N));
  std::lock_guard<std::mutex> lk(mu);
  cache[{k, N}] = built;
  return *built;
}

double petersson_rhs(int k, int m, int n, int c_max, double tail_tol, double* tail) {
  if (m < 1 || n < 1) throw DomainError("petersson_rhs: m, n must be >= 1");
  const double x1 = 4 * kPi * std::sqrt(double(m) * n);
  const double sign = (k / 2) % 2 ? -1.0 : 1.0;  // i^{-k}
  const double g = std::sqrt(double(std::gcd(m, n)));
  // Weil + tau(c) <= 2 sqrt(c) + J bound (x/2)^{k-1}/(k-1)!:
  // sum_{c>C} <= 2 g (2 pi sqrt(mn))^{k-1} / ((k-1)! (k-2) C^{k-2})
  const double logA = std::log(2 * g) + (k - 1) * std::log(x1 / 2) - std::lgamma(double(k)) -
                      std::log(k - 2.0);
  CompensatedSum<> s;
  int c = 1;
  double bound = 0;
  for (;; ++c) {
    const double S = kloosterman(m, n, c);
    if (S != 0) s.add(S / c * bessel_j_integer(k - 1, x1 / c));
    bound = std::exp(logA - (k - 2) * std::log(double(c)));
    if (c_max > 0 ? c >= c_max : bound < tail_tol) break;
    if (c > 200000) throw NumericError("petersson_rhs: c-sum did not reach its tolerance");
  }
  if (tail) *tail = bound;
  return (m == n ? 1.0 : 0.0) + 2 * kPi * sign * s.value();
}

std::vector<double> harmonic_weights(int k, const std::vector<HeckeEigenform>& forms,
                                     double* residual, double* condition) {
  const int d = static_cast<int>(forms.size());
  if (d == 0) return {};
  if (d == 1) {
    const double w = petersson_rhs(k, 1, 1);
    if (residual) *residual = 0;
    if (condition) *condition = 1;
    return {w};
  }
  std::vector<std::pair<int, int>> pairs;
  for (int n = 1; n <= d; ++n) pairs.emplace_back(1, n);
  for (int n = 2; n <= d + 1; ++n) pairs.emplace_back(2, n);
  Eigen::MatrixXd A(pairs.size(), d);
  Eigen::VectorXd b(pairs.size());
  for (size_t r = 0; r < pairs.size(); ++r) {
    const auto [m, n] = pairs[r];
    for (int j = 0; j < d; ++j) A(r, j) = forms[j].lambda.at(m) * forms[j].lambda.at(n);
    b(r) = petersson_rhs(k, m, n);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (condition) *condition = cond;
  if (!(cond < 1e8)) {
    std::ostringstream os;
    os << "harmonic_weights: Petersson system ill-conditioned at k = " << k << " (condition "
       << cond << ")";
    throw NumericError(os.str());
  }
  const Eigen::VectorXd w = svd.solve(b);
  const double res = (A * w - b).norm();
  if (residual) *residual = res;
  if (res > 1e-8) {
    std::ostringstream os;
    os << "harmonic_weights: least-squares residual " << res << " at k = " << k;
    throw NumericError(os.str());
  }
  return std::vector<double>(w.data(), w.data() + d);
}

double harmonic_weight(const HeckeEigenform& f) {
  const auto forms = hecke_basis(f.k, f.max_n());
  return harmonic_weights(f.k, forms).at(f.index);
}

std::vector<HeckeEigenform> harmonic_family(double K, int residue_mod4, int N) {
  if (!(K >= 10)) throw DomainError("harmonic_family: K must be >= 10");
  if (residue_mod4 != 0 && residue_mod4 != 2) throw DomainError("harmonic_family: residue 0 or 2");
  std::vector<HeckeEigenform> out;
  for (int k = static_cast<int>(std::ceil(K)); k <= 2 * K; ++k) {
    if (k % 4 != residue_mod4 || k < 12) continue;
    for (auto& f : hecke_basis(k, N)) out.push_back(f);
  }
  return out;
}

}  // namespace superpos
