#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "superpos/eigenforms.hpp"

using nlohmann::json;
using superpos::cli::run;

namespace {

struct Out {
  int code;
  std::string out, err;
};

Out call(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = run(args, o, e);
  return {code, o.str(), e.str()};
}

}  // namespace

TEST_CASE("eigenform CSV round trips the coefficients exactly") {
  const auto r = call({"--format", "csv", "eigenform", "--weight", "26", "--num-coeffs", "50"});
  REQUIRE(r.code == superpos::cli::kOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,index,n,lambda");
  const auto forms = superpos::hecke_basis(26, 50);
  int rows = 0;
  while (std::getline(in, line)) {
    int k, idx, n;
    char lam[64];
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%d,%63s", &k, &idx, &n, lam) == 4);
    CHECK(k == 26);
    const double v = std::strtod(lam, nullptr);
    CHECK(v == forms[idx].lambda[n]);  // bit-exact
    if (n == 1) CHECK(v == 1.0);
    ++rows;
  }
  CHECK(rows == 50);
}

TEST_CASE("eigenform JSON carries the schema") {
  const auto r = call({"eigenform", "--weight", "24", "--num-coeffs", "5"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema"] == superpos::cli::kSchema);
  CHECK(j["forms"].size() == 2);
  CHECK(j["forms"][0]["lambda"].size() == 5);
}

TEST_CASE("certify weight 12 exits 0 with a certified verdict") {
  const auto r = call({"certify", "--weight", "12"});
  REQUIRE(r.code == superpos::cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["certificate"]["verdict"] == "certified");
  CHECK(j["certificate"]["disk_winding"] == 0);
  CHECK(j["superpositivity"]["holds"] == true);
}

TEST_CASE("constants total stays below the claimed bound") {
  const auto r = call({"constants", "--which", "total"});
  REQUIRE(r.code == superpos::cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["total"]["value"].get<double>() <= 0.63);
  CHECK(j["proportion"]["value"].get<double>() >= 0.27);
  CHECK(j["components"].contains("n0"));
}

TEST_CASE("constants CSV has one row per component") {
  const auto r = call({"--format", "csv", "constants", "--which", "nj", "--j", "2"});
  REQUIRE(r.code == superpos::cli::kOk);
  CHECK(r.out.rfind("name,value,error_estimate,paper_bound,pass\n", 0) == 0);
  CHECK(r.out.find("n2,0.0389") != std::string::npos);
}

TEST_CASE("moments without --twisted is a usage error") {
  CHECK(call({"moments"}).code == superpos::cli::kUsage);
  const auto r = call({"moments", "--twisted", "--K", "20"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["ratio"].get<double>() > 0.5);
}

TEST_CASE("usage errors exit 1") {
  CHECK(call({}).code == superpos::cli::kUsage);
  CHECK(call({"frobnicate"}).code == superpos::cli::kUsage);
  CHECK(call({"eigenform"}).code == superpos::cli::kUsage);               // missing --weight
  CHECK(call({"eigenform", "--weight", "13"}).code == superpos::cli::kUsage);  // odd weight
  CHECK(call({"identities", "--check", "nope"}).code == superpos::cli::kUsage);
  CHECK(call({"--format", "xml", "constants"}).code == superpos::cli::kUsage);
  CHECK(call({"constants", "--which", "nj", "--j", "99"}).code == superpos::cli::kUsage);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("config file supplies options") {
  const std::string path = "test_cli_config.ini";
  {
    std::ofstream f(path);
    f << "format=csv\n[eigenform]\nweight=12\nnum-coeffs=3\n";
  }
  const auto r = call({"--config", path, "eigenform"});
  std::remove(path.c_str());
  REQUIRE(r.code == 0);
  // normalized Ramanujan tau: lambda(n) = tau(n) n^{-11/2}
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,index,n,lambda");
  const double tau[] = {1, -24, 252};
  int n = 0;
  while (std::getline(in, line)) {
    const double lam = std::strtod(line.substr(line.rfind(',') + 1).c_str(), nullptr);
    CHECK(lam * std::pow(n + 1, 5.5) == doctest::Approx(tau[n]).epsilon(1e-13));
    ++n;
  }
  CHECK(n == 3);
}

TEST_CASE("identities dirichlet prints a table and passes") {
  const auto r = call({"identities", "--check", "dirichlet"});
  CHECK(r.code == 0);
  CHECK(r.out.find("ok") != std::string::npos);
}
