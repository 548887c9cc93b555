#include "selftest.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <thread>

#include "superpos/certify.hpp"
#include "superpos/constants.hpp"
#include "superpos/specialfn.hpp"

namespace superpos::selftest {

namespace {

using Rng = std::mt19937_64;

struct Suite {
  const char* name;
  double threshold;
  // returns the worst residual, counts cases
  std::function<double(Rng&, int&)> body;
};

double hecke_relations(Rng&, int& cases) {
  double worst = 0;
  for (int k : {12, 24, 36, 48}) {
    for (const auto& f : hecke_basis(k, 900)) {
      for (int m = 1; m <= 30; ++m)
        for (int n = 1; n <= 30; ++n) {
          double rhs = 0;
          const int g = std::gcd(m, n);
          for (int d = 1; d <= g; ++d)
            if (g % d == 0) rhs += f.lambda[m * n / (d * d)];
          worst = std::max(worst, std::abs(f.lambda[m] * f.lambda[n] - rhs));
          ++cases;
        }
    }
  }
  return worst;
}

double functional_equation(Rng& rng, int& cases) {
  std::uniform_real_distribution<double> sig(-1, 2), tt(-10, 10);
  double worst = 0;
  for (int k : {12, 18, 24, 30, 36}) {
    const auto L = make_lfunction(k);
    for (int i = 0; i < 5; ++i) {
      const cplx s(sig(rng), tt(rng));
      const cplx a = L.lambda(s), b = double(L.epsilon()) * L.lambda(1.0 - s);
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
      ++cases;
    }
  }
  return worst;
}

double winding_integrality(Rng& rng, int& cases) {
  std::uniform_real_distribution<double> U(-0.5, 1.5);
  double worst = 0;
  const auto box = Contour::rectangle(0, 1, 0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<cplx> zs;
    int inside = 0;
    for (int i = 0; i < 4; ++i) {
      cplx z(U(rng), U(rng));
      // keep zeros off the contour
      if (std::min({std::abs(z.real()), std::abs(z.real() - 1), std::abs(z.imag()), std::abs(z.imag() - 1)}) < 0.02)
        z += cplx(0.05, 0.05);
      zs.push_back(z);
      if (z.real() > 0 && z.real() < 1 && z.imag() > 0 && z.imag() < 1) ++inside;
    }
    const auto w = winding_number(
        [&](cplx s) {
          cplx p = 1;
          for (const auto& z : zs) p *= s - z;
          return p;
        },
        box);
    worst = std::max(worst, std::abs(w.raw - inside));
    ++cases;
  }
  // Lambda of Delta has no zeros right of the critical line
  const auto L = make_lfunction(12);
  const auto w = winding_number([&](cplx s) { return L.lambda(s); }, Contour::rectangle(0.6, 1.0, -0.5, 0.5));
  worst = std::max(worst, std::abs(w.raw));
  ++cases;
  return worst;
}

double eta_multiplicativity(Rng& rng, int& cases) {
  std::uniform_real_distribution<double> U(-1, 1);
  const ArithmeticTable at(200);
  double worst = 0;
  for (int trial = 0; trial < 3; ++trial) {
    const cplx nu(U(rng), U(rng));
    for (int m = 1; m <= 200; ++m)
      for (int n = 1; m * n <= 200; ++n) {
        cplx rhs = 0;
        for (int d : at.divisors(std::gcd(m, n))) rhs += double(at.mu(d)) * eta(nu, m / d) * eta(nu, n / d);
        worst = std::max(worst, std::abs(eta(nu, m * n) - rhs) / (1 + std::abs(rhs)));
        ++cases;
      }
  }
  return worst;
}

double h_oddness(Rng& rng, int& cases) {
  std::uniform_real_distribution<double> re(-3, 3), im(-20, 20);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const cplx s(re(rng), im(rng));
    if (std::abs(s) < 0.1) continue;
    worst = std::max(worst, std::abs(mellin_h(s) + mellin_h(-s)) / (1 + std::abs(mellin_h(s))));
    ++cases;
  }
  return worst;
}

double petersson(Rng&, int& cases) {
  double worst = 0;
  for (int k : {12, 16, 18, 20, 22})
    for (int m = 1; m <= 6; ++m)
      for (int n = m; n <= 6; ++n) {
        double lhs = 0;
        for (const auto& f : hecke_basis(k, 40)) lhs += f.omega * f.lambda[m] * f.lambda[n];
        worst = std::max(worst, std::abs(lhs - petersson_rhs(k, m, n)));
        ++cases;
      }
  return worst;
}

double selberg(Rng& rng, int& cases) {
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double W0 = -1 + 2 * u(rng), H = 0.3 + 1.5 * u(rng), W1 = W0 + 0.5 + 2 * u(rng);
    const int nz = 1 + static_cast<int>(5 * u(rng));
    std::vector<cplx> zs;
    for (int i = 0; i < nz; ++i) zs.emplace_back(W0 + 0.05 + (W1 - W0 - 0.2) * u(rng), (H - 0.05) * (2 * u(rng) - 1));
    const cplx scale(0.3 + u(rng), u(rng));
    auto phi = [&](cplx s) {
      cplx p = scale;
      for (const auto& z : zs) p *= s - z;
      return p;
    };
    worst = std::max(worst, selberg_identity_check(phi, zs, SelbergBox(W0, W1, H)).residual);
    ++cases;
  }
  return worst;
}

double mollifier_representations(Rng& rng, int& cases) {
  std::uniform_real_distribution<double> us(0.5, 2.0), ut(-20, 20);
  double worst = 0;
  for (int k : {12, 24, 36}) {
    const auto forms = hecke_basis(k, 400);
    for (const auto& f : forms)
      for (int i = 0; i < 3; ++i) {
        worst = std::max(worst, mollifier_value(f, cplx(us(rng), ut(rng)), 30).agreement);
        ++cases;
      }
  }
  return worst;
}

double v_evenness(Rng& rng, int& cases) {
  std::uniform_real_distribution<double> U(-4, 30), W(0.05, 40);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const double u = U(rng), v = W(rng);
    const auto p = script_v(u, v), m = script_v(u, -v);
    worst = std::max(worst, std::abs(p.minus_one - m.minus_one) / std::max(1.0, std::abs(p.value)));
    worst = std::max(worst, script_v_conjugate_residue(u, v));
    ++cases;
  }
  return worst;
}

}  // namespace

std::vector<SuiteResult> run_all(std::uint64_t seed, int threads) {
  const std::vector<Suite> suites = {
      {"hecke-relations", 1e-9, hecke_relations},
      {"functional-equation", 1e-10, functional_equation},
      {"winding-integrality", 1e-6, winding_integrality},
      {"eta-multiplicativity", 1e-11, eta_multiplicativity},
      {"h-transform-oddness", 1e-12, h_oddness},
      {"petersson", 1e-8, petersson},
      {"selberg-identity", 1e-8, selberg},
      {"mollifier-representations", 1e-10, mollifier_representations},
      {"v-evenness", 1e-10, v_evenness},
  };
  std::vector<SuiteResult> out(suites.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < suites.size();) {
      const auto& s = suites[i];
      auto& r = out[i];
      r.name = s.name;
      r.threshold = s.threshold;
      // each suite draws from its own stream, so results do not depend on scheduling
      Rng rng(seed * 1000003 + i);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        r.worst = s.body(rng, r.cases);
        r.pass = r.worst < r.threshold;
      } catch (const std::exception& e) {
        r.pass = false;
        r.detail = e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace superpos::selftest
