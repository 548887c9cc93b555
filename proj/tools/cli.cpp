#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "selftest.hpp"
#include "superpos/certify.hpp"
#include "superpos/constants.hpp"
#include "superpos/identities.hpp"

namespace superpos::cli {

namespace {

using json = nlohmann::ordered_json;  // keeps report fields in insertion order

struct RunConfig {
  std::string format = "auto";  // json | csv | text; auto picks per command
  std::string output;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int threads = 0;
};

// Shortest round-trip text for a double.
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Short form for labels and quoted bounds.
std::string shortnum(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

json header(const std::string& command, const RunConfig& cfg) {
  return {{"schema", kSchema}, {"command", command}, {"seed", cfg.seed}, {"tol", cfg.tol}};
}

// ---- eigenform

struct EigenformArgs {
  int weight = 12, num_coeffs = 100, index = -1;
};

int cmd_eigenform(const EigenformArgs& a, const RunConfig& cfg, std::ostream& out) {
  if (a.num_coeffs < 1) throw DomainError("eigenform: --num-coeffs must be positive");
  const auto forms = hecke_basis(a.weight, a.num_coeffs);
  if (a.index >= static_cast<int>(forms.size())) throw DomainError("eigenform: no form with that index");
  std::vector<const HeckeEigenform*> pick;
  for (const auto& f : forms)
    if (a.index < 0 || f.index == a.index) pick.push_back(&f);
  if (cfg.format == "csv") {
    out << "k,index,n,lambda\n";
    for (const auto* f : pick)
      for (int n = 1; n <= a.num_coeffs; ++n) out << f->k << ',' << f->index << ',' << n << ',' << num(f->lambda[n]) << '\n';
    return kOk;
  }
  if (cfg.format == "text") {
    for (const auto* f : pick) {
      out << "weight " << f->k << " form " << f->index << "  epsilon " << f->epsilon << "  omega " << num(f->omega)
          << "  (" << f->provenance << ")\n";
      for (int n = 1; n <= std::min(a.num_coeffs, 10); ++n) out << "  lambda(" << n << ") = " << num(f->lambda[n]) << '\n';
    }
    return kOk;
  }
  json j = header("eigenform", cfg);
  j["forms"] = json::array();
  for (const auto* f : pick) {
    std::vector<double> lam(f->lambda.begin() + 1, f->lambda.begin() + a.num_coeffs + 1);
    j["forms"].push_back({{"weight", f->k},
                          {"index", f->index},
                          {"epsilon", f->epsilon},
                          {"omega", f->omega},
                          {"omega_residual", f->omega_residual},
                          {"provenance", f->provenance},
                          {"lambda", lam}});
  }
  out << j.dump(2) << '\n';
  return kOk;
}

// ---- certify

struct CertifyArgs {
  int weight = 12, index = 0, max_deriv = 12, num_coeffs = 600;
  double rho = 0.02;
};

int cmd_certify(const CertifyArgs& a, const RunConfig& cfg, std::ostream& out) {
  const auto L = make_lfunction(a.weight, a.index, a.num_coeffs);
  const auto z = certify_triangle(L, a.rho, a.max_deriv);
  const auto sp = superpositivity_report(L, a.max_deriv);
  json j = header("certify", cfg);
  j["certificate"] = {{"form", z.form_id},
                      {"weight", z.weight},
                      {"epsilon", z.epsilon},
                      {"rho", z.rho},
                      {"central_order", z.central_order},
                      {"disk_winding", z.disk_winding},
                      {"rect_winding", z.rect_winding},
                      {"disk_raw", z.disk_raw},
                      {"rect_raw", z.rect_raw},
                      {"disk_margin", z.disk_margin},
                      {"rect_margin", z.rect_margin},
                      {"rect_margin_undeflated", z.rect_margin_undeflated},
                      {"margin_threshold", kMarginThreshold},
                      {"line_zeros", z.line_zeros},
                      {"central_derivatives", z.central_derivatives},
                      {"evaluations", z.evaluations},
                      {"verdict", to_string(z.verdict)},
                      {"reason", z.reason}};
  std::vector<int> signs;
  for (auto s : sp.central_sign) signs.push_back(static_cast<int>(s));
  j["superpositivity"] = {{"max_order", sp.max_order},
                          {"k0", sp.k0},
                          {"central", sp.central},
                          {"central_sign", signs},
                          {"sigmas", sp.sigmas},
                          {"clause1", sp.clause1},
                          {"clause2", sp.clause2},
                          {"clause3", sp.clause3},
                          {"holds", sp.holds()}};
  if (cfg.format == "text") {
    out << z.form_id << ": " << to_string(z.verdict) << "  central order " << z.central_order << "  windings "
        << z.disk_winding << '/' << z.rect_winding << "  margins " << num(z.disk_margin) << ' ' << num(z.rect_margin)
        << "\n  super-positivity to order " << sp.max_order << ": " << (sp.holds() ? "holds" : "fails") << '\n';
    if (!z.reason.empty()) out << "  " << z.reason << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  switch (z.verdict) {
    case Verdict::certified:
      return kOk;
    case Verdict::not_certified:
      return kNotCertified;
    case Verdict::failed:
      break;
  }
  return kNumericFailure;
}

// ---- identities

struct Row {
  std::string label;
  double residual, bound;  // pass means residual < bound
  std::string note;
};

std::vector<Row> check_rows(const std::string& which, const RunConfig& cfg, double* slope) {
  std::vector<Row> rows;
  if (which == "petersson") {
    for (int k : {12, 16, 18, 20, 22, 24, 26})
      for (int m = 1; m <= 10; ++m)
        for (int n = m; n <= 10; ++n) {
          const auto p = petersson_check(k, m, n);
          rows.push_back({"k=" + std::to_string(k) + " m=" + std::to_string(m) + " n=" + std::to_string(n), p.residual,
                          1e-8, "c_max=" + std::to_string(p.c_max)});
        }
  } else if (which == "bessel-avg") {
    std::vector<double> lx, ly;
    for (double K : {25.0, 50.0, 100.0, 200.0}) {
      const auto b = bessel_average_check(K, 1.5 * K);
      rows.push_back({"K=" + shortnum(K) + " x=1.5K", b.error, 1e-3, "scaled=" + shortnum(b.scaled_error)});
      lx.push_back(std::log(K));
      ly.push_back(std::log(b.error));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    *slope = sxy / sxx;
    rows.push_back({"slope of log error vs log K", std::abs(*slope + 2), 0.3, "slope=" + shortnum(*slope) + " (expect -2)"});
  } else if (which == "voronoi") {
    const auto g = VoronoiTestFunction::gaussian_bump(5, 20);
    struct C {
      double t;
      int a, c;
    };
    for (const C& c : {C{0.3, 1, 1}, C{0.3, 2, 5}, C{-0.7, 3, 7}, C{1.2, 5, 12}, C{0.1, 1, 3}}) {
      const auto v = voronoi_check(c.t, c.a, c.c, g);
      rows.push_back({"t=" + shortnum(c.t) + " a/c=" + std::to_string(c.a) + "/" + std::to_string(c.c), v.residual, 1e-7,
                      "dual terms " + std::to_string(v.j_terms) + "+" + std::to_string(v.k_terms)});
    }
  } else if (which == "dirichlet") {
    const auto a = dirichlet_identity_check(12, 1.1);
    rows.push_back({"ell=12 s=1.1", a.residual, a.tail_bound, "bound is the truncation tail"});
    const auto b = dirichlet_identity_check(std::nullopt, cplx(1.2, 0.5));
    rows.push_back({"phi(c) s=1.2+0.5i", b.residual, b.tail_bound, "bound is the truncation tail"});
    const auto c = dirichlet_identity_check(1, cplx(0.8, 3));
    rows.push_back({"ell=1 s=0.8+3i", c.residual, c.tail_bound, "bound is the truncation tail"});
  } else if (which == "selberg") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0, 1);
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
      const auto r = selberg_identity_check(phi, zs, SelbergBox(W0, W1, H));
      rows.push_back({"polynomial " + std::to_string(trial) + " (" + std::to_string(nz) + " zeros)", r.residual, 1e-8,
                      "lhs=" + shortnum(r.lhs)});
    }
  } else {
    throw DomainError("identities: unknown check " + which);
  }
  return rows;
}

int cmd_identities(const std::string& which, const RunConfig& cfg, std::ostream& out) {
  double slope = 0;
  const auto rows = check_rows(which, cfg, &slope);
  bool all = true;
  for (const auto& r : rows) all = all && r.residual < r.bound;
  if (cfg.format == "json") {
    json j = header("identities", cfg);
    j["check"] = which;
    j["rows"] = json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"case", r.label}, {"residual", r.residual}, {"bound", r.bound}, {"pass", r.residual < r.bound}, {"note", r.note}});
    if (which == "bessel-avg") j["slope"] = slope;
    j["pass"] = all;
    out << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    out << "case,residual,bound,pass\n";
    for (const auto& r : rows) out << '"' << r.label << "\"," << num(r.residual) << ',' << num(r.bound) << ',' << (r.residual < r.bound) << '\n';
  } else {
    out << std::left << std::setw(34) << "case" << std::setw(14) << "residual" << std::setw(12) << "bound"
        << "pass\n";
    for (const auto& r : rows) {
      char res[32], bnd[32];
      std::snprintf(res, sizeof res, "%.3e", r.residual);
      std::snprintf(bnd, sizeof bnd, "%.1e", r.bound);
      out << std::setw(34) << r.label << std::setw(14) << res << std::setw(12) << bnd
          << (r.residual < r.bound ? "ok" : "FAIL") << "  " << r.note << '\n';
    }
  }
  return all ? kOk : kNotCertified;
}

// ---- moments

struct MomentArgs {
  bool twisted = false;
  int ell = 1;
  double delta = 0.02, t = 0, K = 30;
};

int cmd_moments(const MomentArgs& a, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!a.twisted) {
    err << "moments: only the twisted second moment is available; pass --twisted\n";
    return kUsage;
  }
  const auto m = twisted_moment(a.ell, a.delta, a.t, a.K);
  json j = header("moments", cfg);
  j["ell"] = a.ell;
  j["delta"] = a.delta;
  j["t"] = a.t;
  j["K"] = a.K;
  j["lhs"] = m.lhs;
  j["main_terms"] = {{"term1", m.main.term1},       {"term2", m.main.term2}, {"merged12", m.main.merged12},
                     {"term3", m.main.term3},       {"total", m.main.total}};
  // the poles at delta = 0 show up as infinities, which JSON cannot carry
  for (auto& [key, val] : j["main_terms"].items())
    if (!std::isfinite(val.get<double>())) val = val.get<double>() > 0 ? "+inf" : "-inf";
  j["ratio"] = m.ratio;
  if (cfg.format == "text")
    out << "lhs " << num(m.lhs) << "\nmain " << num(m.main.total) << "\nratio " << num(m.ratio) << '\n';
  else
    out << j.dump(2) << '\n';
  return kOk;
}

// ---- constants

struct ConstantsArgs {
  std::string which = "total";
  int j = 0;  // 0: all of 1..13
};

json bound_json(const BoundValue& b, double paper, bool upper = true) {
  return {{"value", b.value},
          {"error_estimate", b.error_estimate},
          {"tail", b.tail},
          {"paper_bound", paper},
          {"pass", upper ? b.value <= paper : b.value >= paper}};
}

json scalar_json(double v, double err, double paper, bool upper = true) {
  return {{"value", v}, {"error_estimate", err}, {"paper_bound", paper}, {"pass", upper ? v <= paper : v >= paper}};
}

int cmd_constants(const ConstantsArgs& a, const RunConfig& cfg, std::ostream& out) {
  ConstantsOptions opt;
  opt.tol = cfg.tol;
  json j = header("constants", cfg);
  j["which"] = a.which;
  j["asymptotic"] = true;  // O((log K)^{-c}) terms dropped
  bool pass = true;
  std::vector<std::pair<std::string, json>> entries;
  const double paper_nj[] = {0.19441, 0.03891, 0.00989};
  if (a.which == "n0") {
    entries.emplace_back("n0", bound_json(n0_bound({}, opt), 0.3613));
  } else if (a.which == "nj") {
    if (a.j < 0 || a.j > 40) throw DomainError("constants: --j must lie in [1, 40]");
    const int lo = a.j ? a.j : 1, hi = a.j ? a.j : 13;
    for (int jj = lo; jj <= hi; ++jj) {
      const auto b = nj_bound(jj, {}, opt);
      json e = jj <= 3 ? bound_json(b, paper_nj[jj - 1]) : json{{"value", b.value}, {"error_estimate", b.error_estimate}, {"tail", b.tail}};
      entries.emplace_back("n" + std::to_string(jj), e);
    }
  } else if (a.which == "tail") {
    entries.emplace_back("tail", scalar_json(closed_form_tail(), 0, 0.01212));
  } else if (a.which == "total") {
    const auto r = tail_and_total({}, opt);
    // only total and proportion decide the exit code here
    entries.emplace_back("total", scalar_json(r.total, r.error_estimate, 0.63));
    entries.emplace_back("proportion", scalar_json(r.proportion, r.error_estimate, 0.27, false));
    json parts = json::object();
    parts["n0"] = bound_json(r.n0, 0.3613);
    for (int jj = 1; jj <= 13; ++jj) {
      const auto& b = r.nj[jj - 1];
      parts["n" + std::to_string(jj)] = jj <= 3 ? bound_json(b, paper_nj[jj - 1])
                                                : json{{"value", b.value}, {"error_estimate", b.error_estimate}};
    }
    double e413 = 0;
    for (int jj = 4; jj <= 13; ++jj) e413 += r.nj[jj - 1].error_estimate;
    parts["sum_4_13"] = scalar_json(r.sum_4_13, e413, 0.00439);
    parts["tail"] = scalar_json(r.tail, 0, 0.01212);
    parts["hough"] = {{"value", r.hough}, {"asymptotic", r.hough_asymptotic}};
    j["components"] = parts;
  } else if (a.which == "lemma-vl") {
    const auto s = lemma_vl_scan();
    entries.emplace_back("lemma-vl", json{{"points", s.points},
                                          {"violations", s.violations},
                                          {"worst_slack", s.worst_slack},
                                          {"worst_u", s.worst_u},
                                          {"worst_v", s.worst_v},
                                          {"worst_inequality", s.worst_inequality},
                                          {"pass", s.violations == 0}});
  } else {
    throw DomainError("constants: --which must be n0, nj, tail, total or lemma-vl");
  }
  for (const auto& [name, e] : entries) {
    j[name] = e;
    if (e.contains("pass")) pass = pass && e["pass"].get<bool>();
  }
  if (cfg.format == "csv") {
    out << "name,value,error_estimate,paper_bound,pass\n";
    auto row = [&](const std::string& name, const json& e) {
      if (!e.contains("value")) return;
      out << name << ',' << num(e["value"].get<double>()) << ','
          << (e.contains("error_estimate") ? num(e["error_estimate"].get<double>()) : "") << ','
          << (e.contains("paper_bound") ? shortnum(e["paper_bound"].get<double>()) : "") << ','
          << (e.contains("pass") ? (e["pass"].get<bool>() ? "1" : "0") : "") << '\n';
    };
    if (j.contains("components"))
      for (auto& [name, e] : j["components"].items()) row(name, e);
    for (const auto& [name, e] : entries) row(name, e);
  } else if (cfg.format == "text") {
    for (const auto& [name, e] : entries) out << name << ": " << e.dump() << '\n';
  } else {
    j["pass"] = pass;
    out << j.dump(2) << '\n';
  }
  return pass ? kOk : kNotCertified;
}

// ---- selftest

int cmd_selftest(const RunConfig& cfg, std::ostream& out) {
  const int threads = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto res = selftest::run_all(cfg.seed, threads);
  bool all = true;
  json j = header("selftest", cfg);
  j["suites"] = json::array();
  for (const auto& r : res) {
    all = all && r.pass;
    j["suites"].push_back({{"name", r.name},
                           {"worst", r.worst},
                           {"threshold", r.threshold},
                           {"cases", r.cases},
                           {"pass", r.pass},
                           {"seconds", r.seconds},
                           {"detail", r.detail}});
  }
  j["pass"] = all;
  if (cfg.format == "json") {
    out << j.dump(2) << '\n';
  } else {
    for (const auto& r : res) {
      char line[160];
      std::snprintf(line, sizeof line, "%-28s %-4s worst %.2e < %.0e  (%d cases, %.1fs)", r.name.c_str(),
                    r.pass ? "ok" : "FAIL", r.worst, r.threshold, r.cases, r.seconds);
      out << line;
      if (!r.detail.empty()) out << "  " << r.detail;
      out << '\n';
    }
    out << (all ? "selftest passed\n" : "selftest FAILED\n");
  }
  return all ? kOk : kNotCertified;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Super-positivity certificates, identity checks and zero-density constants"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file ([subcommand] sections allowed)");
  RunConfig cfg;
  app.add_option("--format", cfg.format, "json, csv or text")->check(CLI::IsMember({"auto", "json", "csv", "text"}));
  app.add_option("--output,-o", cfg.output, "write the report here instead of stdout");
  app.add_option("--tol", cfg.tol, "quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "seed for randomized suites");
  app.add_option("--threads", cfg.threads, "worker threads (0: all cores)")->envname("SUPERPOS_THREADS");

  EigenformArgs ea;
  auto* eig = app.add_subcommand("eigenform", "Hecke eigenforms of level 1");
  eig->add_option("--weight,-k", ea.weight)->required();
  eig->add_option("--num-coeffs,-n", ea.num_coeffs);
  eig->add_option("--index", ea.index, "form index (default: all)");

  CertifyArgs ca;
  auto* cer = app.add_subcommand("certify", "certify triangle zero-freeness and super-positivity");
  cer->add_option("--weight,-k", ca.weight)->required();
  cer->add_option("--index", ca.index);
  cer->add_option("--rho", ca.rho);
  cer->add_option("--max-deriv", ca.max_deriv);
  cer->add_option("--num-coeffs", ca.num_coeffs);

  std::string which_id;
  auto* ids = app.add_subcommand("identities", "numerical checks of the identities");
  ids->add_option("--check", which_id)
      ->required()
      ->check(CLI::IsMember({"petersson", "bessel-avg", "voronoi", "dirichlet", "selberg"}));

  MomentArgs ma;
  auto* mom = app.add_subcommand("moments", "harmonic family moments");
  mom->add_flag("--twisted", ma.twisted, "twisted second moment against its main terms");
  mom->add_option("--ell", ma.ell);
  mom->add_option("--delta", ma.delta);
  mom->add_option("--t", ma.t);
  mom->add_option("--K", ma.K);

  ConstantsArgs ka;
  auto* con = app.add_subcommand("constants", "zero-density constants by quadrature");
  con->add_option("--which", ka.which)->check(CLI::IsMember({"n0", "nj", "tail", "total", "lemma-vl"}));
  con->add_option("--j", ka.j, "single j for --which nj (default 1..13)");

  auto* self = app.add_subcommand("selftest", "invariant suites of every module");

  std::vector<std::string> argv_store{"superpos"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      err << "cannot open " << cfg.output << " for writing\n";
      return kUsage;
    }
  }
  std::ostream& dst = cfg.output.empty() ? out : file;
  try {
    if (*eig) {
      if (cfg.format == "auto") cfg.format = "json";
      return cmd_eigenform(ea, cfg, dst);
    }
    if (*cer) {
      if (cfg.format == "auto" || cfg.format == "csv") cfg.format = "json";
      return cmd_certify(ca, cfg, dst);
    }
    if (*ids) {
      if (cfg.format == "auto") cfg.format = "text";
      return cmd_identities(which_id, cfg, dst);
    }
    if (*mom) {
      if (cfg.format == "auto" || cfg.format == "csv") cfg.format = "json";
      return cmd_moments(ma, cfg, dst, err);
    }
    if (*con) {
      if (cfg.format == "auto") cfg.format = "json";
      return cmd_constants(ka, cfg, dst);
    }
    if (*self) {
      if (cfg.format == "auto" || cfg.format == "csv") cfg.format = "text";
      return cmd_selftest(cfg, dst);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kUsage;
}

}  // namespace superpos::cli
