#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mfbm_asian/mfbm_asian.hpp"

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CmdResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const auto tmp = std::filesystem::temp_directory_path();
  const auto out_path = tmp / ("mfbm_cli_out_" + std::to_string(++counter));
  const auto err_path = tmp / ("mfbm_cli_err_" + std::to_string(counter));
  const std::string cmd = env_prefix + std::string(MFBM_CLI_PATH) + " " + args +
                          " >" + out_path.string() + " 2>" + err_path.string();
  const int status = std::system(cmd.c_str());
  CmdResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(err_path);
  return result;
}

const std::string kBaseArgs =
    "--s0 100 --k 100 --t 1 --r 0.05 --q 0 --sigma 0.2 --eps 0 --h 0.5 "
    "--lambda 0 --kind call --avg geometric";

}  // namespace

TEST_CASE("price emits JSON matching the library value") {
  const CmdResult res = run_cli("price " + kBaseArgs);
  REQUIRE(res.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(res.out);

  mfbm::ModelParams model;
  model.s0 = 100.0;
  model.r = 0.05;
  model.sigma = 0.2;
  model.hurst = 0.5;
  mfbm::OptionContract contract;
  contract.strike = 100.0;
  contract.maturity = 1.0;
  const double expected = mfbm::price_geometric_power(model, contract).price;
  CHECK(j.at("price").get<double>() == Catch::Approx(expected).epsilon(1e-15));
  CHECK(j.at("series_terms").get<int>() == 1);
  CHECK(j.at("warnings").size() == 1);  // hurst-below-3/4 at H = 0.5
}

TEST_CASE("price CSV round-trips at 12 significant digits") {
  const CmdResult res = run_cli("price " + kBaseArgs + " --format csv");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string header, row;
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, row));
  CHECK(header == "price,lower_bound,upper_bound,error_bound,series_terms");
  const std::string price_field = row.substr(0, row.find(','));
  const double parsed = std::strtod(price_field.c_str(), nullptr);
  CHECK(mfbm::format_sig12(parsed) == price_field);
}

TEST_CASE("missing maturity is reported by name with exit code 2") {
  const CmdResult res = run_cli("price --s0 100 --k 100 --sigma 0.2");
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("maturity") != std::string::npos);
}

TEST_CASE("invalid parameter values name the violated invariant") {
  const CmdResult res = run_cli("price " + kBaseArgs + " --h 1.5");
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("hurst") != std::string::npos);
}

TEST_CASE("unknown flags and commands exit 64 with usage text") {
  const CmdResult unknown_flag = run_cli("price " + kBaseArgs + " --bogus 3");
  CHECK(unknown_flag.exit_code == 64);
  CHECK(unknown_flag.err.find("Usage") != std::string::npos);

  const CmdResult unknown_cmd = run_cli("frobnicate");
  CHECK(unknown_cmd.exit_code == 64);
}

TEST_CASE("sweep produces the pinned CSV layout") {
  const CmdResult res = run_cli(
      "sweep --axis hurst --start 0.55 --stop 0.95 --points 9 " + kBaseArgs +
      " --eps 0.1 --t 2");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "axis_value,price,lower_bound,upper_bound,error_bound,series_terms");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const double price = std::strtod(
        line.substr(line.find(',') + 1).c_str(), nullptr);
    CHECK(std::isfinite(price));
  }
  CHECK(rows == 9);
}

TEST_CASE("two-axis sweep emits both axis columns") {
  const CmdResult res = run_cli(
      "sweep --axis strike --start 80 --stop 120 --points 5 "
      "--axis2 maturity --start2 0.5 --stop2 2 --points2 5 " +
      kBaseArgs);
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "axis_value,axis2_value,price,lower_bound,upper_bound,error_bound,"
        "series_terms");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 25);
}

TEST_CASE("sweep with a single point is an invalid range") {
  const CmdResult res = run_cli(
      "sweep --axis strike --start 80 --stop 80 --points 1 " + kBaseArgs);
  CHECK(res.exit_code == 2);
}

TEST_CASE("sweep ranges must stay in the parameter domain") {
  const CmdResult hurst = run_cli(
      "sweep --axis hurst --start 0.2 --stop 1.2 --points 5 " + kBaseArgs);
  CHECK(hurst.exit_code == 2);
  CHECK(hurst.err.find("hurst") != std::string::npos);

  const CmdResult repeated = run_cli(
      "sweep --axis strike --start 80 --stop 120 --points 5 "
      "--axis2 strike --start2 80 --stop2 120 --points2 5 " +
      kBaseArgs);
  CHECK(repeated.exit_code == 2);
}

TEST_CASE("sweep output is byte-identical across runs") {
  const std::string args =
      "sweep --axis sigma_j --start 0 --stop 0.4 --points 7 " + kBaseArgs +
      " --lambda 0.5 --mu-j -0.1";
  const CmdResult first = run_cli(args);
  const CmdResult second = run_cli(args);
  REQUIRE(first.exit_code == 0);
  CHECK(first.out == second.out);
}

TEST_CASE("config file supplies defaults and flags override it") {
  const auto tmp = std::filesystem::temp_directory_path() / "mfbm_cli_config.ini";
  {
    std::ofstream f(tmp);
    f << "s0=100\nk=100\nt=1\nsigma=0.25\nr=0.05\n";
  }
  const CmdResult from_file = run_cli("price --config " + tmp.string());
  REQUIRE(from_file.exit_code == 0);
  const double sigma_file =
      nlohmann::json::parse(from_file.out).at("params").at("sigma").get<double>();
  CHECK(sigma_file == 0.25);

  const CmdResult overridden =
      run_cli("price --config " + tmp.string() + " --sigma 0.3");
  REQUIRE(overridden.exit_code == 0);
  const double sigma_cli =
      nlohmann::json::parse(overridden.out).at("params").at("sigma").get<double>();
  CHECK(sigma_cli == 0.3);
  std::filesystem::remove(tmp);
}

TEST_CASE("validate small conditional grid passes and honours the env seed") {
  const CmdResult res = run_cli("validate --oracle conditional --grid small --samples 40000 --seed 42");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("validation passed") != std::string::npos);

  const CmdResult env_run = run_cli(
      "validate --oracle conditional --grid small --samples 40000",
      "MFBM_ASIAN_SEED=42 ");
  REQUIRE(env_run.exit_code == 0);
  CHECK(env_run.out == res.out);
}

TEST_CASE("validate path oracle small grid passes in the exact regime") {
  const CmdResult res =
      run_cli("validate --oracle path --grid small --paths 20000 --steps 64 --seed 7");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("validation passed") != std::string::npos);
}
