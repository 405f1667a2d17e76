// Command-line front end: single-contract pricing, parameter sweeps and
// oracle-validation runs.
//
//   mfbm_asian price --s0 100 --k 100 --t 1 --sigma 0.2 ...
//   mfbm_asian sweep --axis hurst --start 0.55 --stop 0.95 --points 9 ...
//   mfbm_asian validate --oracle conditional --grid small --seed 42
//
// Exit codes: 0 success, 1 validation-run failure, 2 invalid parameter,
// 64 unknown flag/command.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfbm_asian/mfbm_asian.hpp"

namespace {

struct ContractArgs {
  mfbm::ModelParams model;
  double strike = std::numeric_limits<double>::quiet_NaN();
  double maturity = std::numeric_limits<double>::quiet_NaN();
  int power = 1;
  std::string kind = "call";
  std::string averaging = "geometric";
  std::string fidelity = "paper";
  std::string config_path;

  mfbm::OptionContract contract() const {
    // Values can arrive via --config and bypass the CLI membership
    // checks, so reject unknown names here too.
    auto lookup = [](const auto& table, const std::string& value, const char* what) {
      const auto it = table.find(value);
      if (it == table.end()) {
        throw std::invalid_argument(std::string(what) + ": unknown value '" + value + "'");
      }
      return it->second;
    };
    static const std::map<std::string, mfbm::OptionKind> kinds{
        {"call", mfbm::OptionKind::call}, {"put", mfbm::OptionKind::put}};
    static const std::map<std::string, mfbm::Averaging> averagings{
        {"geometric", mfbm::Averaging::geometric},
        {"arithmetic", mfbm::Averaging::arithmetic}};
    static const std::map<std::string, mfbm::Fidelity> fidelities{
        {"paper", mfbm::Fidelity::paper},
        {"consistent", mfbm::Fidelity::consistent}};
    mfbm::OptionContract c;
    c.kind = lookup(kinds, kind, "kind");
    c.averaging = lookup(averagings, averaging, "avg");
    c.fidelity = lookup(fidelities, fidelity, "fidelity");
    c.strike = strike;
    c.maturity = maturity;
    c.power = power;
    return c;
  }
};

void add_contract_options(CLI::App* cmd, ContractArgs& args) {
  // --h is the Hurst exponent, so help stays on --help only.
  cmd->set_help_flag("--help", "Print this help message and exit");
  // Repeated flags keep the last value given.
  cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--s0", args.model.s0, "Spot price (> 0)");
  cmd->add_option("--r", args.model.r, "Risk-free rate per year")->capture_default_str();
  cmd->add_option("--q", args.model.q, "Dividend yield per year")->capture_default_str();
  cmd->add_option("--sigma", args.model.sigma, "Brownian volatility (>= 0)")
      ->capture_default_str();
  cmd->add_option("--eps", args.model.epsilon, "Fractional volatility coefficient (>= 0)")
      ->capture_default_str();
  cmd->add_option("--h,--hurst", args.model.hurst, "Hurst exponent in (0,1)")
      ->capture_default_str();
  cmd->add_option("--lambda", args.model.lambda, "Jump intensity per year (>= 0)")
      ->capture_default_str();
  cmd->add_option("--mu-j", args.model.mu_j, "Jump log-size mean")->capture_default_str();
  cmd->add_option("--sigma-j", args.model.sigma_j, "Jump log-size std dev (>= 0)")
      ->capture_default_str();
  cmd->add_option("--k,--strike", args.strike, "Strike K (>= 0)");
  cmd->add_option("--t,--maturity", args.maturity, "Maturity T in years (> 0)");
  cmd->add_option("--m,--power", args.power, "Payoff power m (integer >= 1)")
      ->capture_default_str();
  cmd->add_option("--kind", args.kind, "Option kind: call | put")
      ->check(CLI::IsMember({"call", "put"}))
      ->capture_default_str();
  cmd->add_option("--avg", args.averaging, "Averaging: geometric | arithmetic")
      ->check(CLI::IsMember({"geometric", "arithmetic"}))
      ->capture_default_str();
  cmd->add_option("--fidelity", args.fidelity, "Formula mode: paper | consistent")
      ->check(CLI::IsMember({"paper", "consistent"}))
      ->capture_default_str();
  cmd->add_option("--config", args.config_path,
                  "Read flat key=value defaults from a file; flags override");
}

// Flat key=value config handling.  A file value only lands where the
// matching flag was not given on the command line.
void apply_config_file(const CLI::App* cmd, ContractArgs& args) {
  if (args.config_path.empty()) return;
  std::ifstream file(args.config_path);
  if (!file) throw std::invalid_argument("cannot open config file " + args.config_path);

  const std::map<std::string, std::function<void(const std::string&)>> setters{
      {"s0", [&](const std::string& v) { args.model.s0 = std::stod(v); }},
      {"r", [&](const std::string& v) { args.model.r = std::stod(v); }},
      {"q", [&](const std::string& v) { args.model.q = std::stod(v); }},
      {"sigma", [&](const std::string& v) { args.model.sigma = std::stod(v); }},
      {"eps", [&](const std::string& v) { args.model.epsilon = std::stod(v); }},
      {"h", [&](const std::string& v) { args.model.hurst = std::stod(v); }},
      {"lambda", [&](const std::string& v) { args.model.lambda = std::stod(v); }},
      {"mu-j", [&](const std::string& v) { args.model.mu_j = std::stod(v); }},
      {"sigma-j", [&](const std::string& v) { args.model.sigma_j = std::stod(v); }},
      {"k", [&](const std::string& v) { args.strike = std::stod(v); }},
      {"t", [&](const std::string& v) { args.maturity = std::stod(v); }},
      {"m", [&](const std::string& v) { args.power = std::stoi(v); }},
      {"kind", [&](const std::string& v) { args.kind = v; }},
      {"avg", [&](const std::string& v) { args.averaging = v; }},
      {"fidelity", [&](const std::string& v) { args.fidelity = v; }},
  };
  const std::map<std::string, std::string> aliases{{"hurst", "h"},
                                                   {"strike", "k"},
                                                   {"maturity", "t"},
                                                   {"power", "m"},
                                                   {"mu_j", "mu-j"},
                                                   {"sigma_j", "sigma-j"}};

  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (auto alias = aliases.find(key); alias != aliases.end()) key = alias->second;
    const auto setter = setters.find(key);
    if (setter == setters.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    if (cmd->count("--" + key) == 0) {
      try {
        setter->second(value);
      } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid value for '" + key + "'");
      }
    }
  }
}

// s0/k/t carry no sensible defaults, so their absence is reported by
// field name rather than through CLI11's required-option machinery
// (which would bypass --config files).
void require_core_fields(const ContractArgs& args) {
  if (std::isnan(args.model.s0)) {
    throw std::invalid_argument("missing required option --s0 (spot price)");
  }
  if (std::isnan(args.strike)) {
    throw std::invalid_argument("missing required option --k (strike)");
  }
  if (std::isnan(args.maturity)) {
    throw std::invalid_argument("missing required option --t (maturity)");
  }
}

nlohmann::json result_json(const ContractArgs& args, const mfbm::PriceResult& res) {
  nlohmann::json j;
  j["params"] = {
      {"s0", args.model.s0},       {"r", args.model.r},
      {"q", args.model.q},         {"sigma", args.model.sigma},
      {"eps", args.model.epsilon}, {"hurst", args.model.hurst},
      {"lambda", args.model.lambda},
      {"mu_j", args.model.mu_j},   {"sigma_j", args.model.sigma_j},
      {"strike", args.strike},     {"maturity", args.maturity},
      {"power", args.power},       {"kind", args.kind},
      {"averaging", args.averaging}, {"fidelity", args.fidelity}};
  j["price"] = res.price;
  j["series_terms"] = res.series_terms;
  j["truncation_bound"] = res.truncation_bound;
  if (res.lower_bound) j["lower_bound"] = *res.lower_bound;
  if (res.upper_bound) j["upper_bound"] = *res.upper_bound;
  if (res.error_bound) j["error_bound"] = *res.error_bound;
  j["warnings"] = res.warnings;
  return j;
}

std::string result_csv(const mfbm::PriceResult& res) {
  auto opt = [](const std::optional<double>& v) {
    return v ? mfbm::format_sig12(*v) : std::string();
  };
  std::string out = "price,lower_bound,upper_bound,error_bound,series_terms\n";
  out += mfbm::format_sig12(res.price) + ',' + opt(res.lower_bound) + ',' +
         opt(res.upper_bound) + ',' + opt(res.error_bound) + ',' +
         std::to_string(res.series_terms) + '\n';
  return out;
}

int run_price(const ContractArgs& args, const std::string& format) {
  require_core_fields(args);
  const mfbm::PriceResult res = mfbm::price(args.model, args.contract());
  if (format == "csv") {
    std::cout << result_csv(res);
  } else {
    std::cout << result_json(args, res).dump(2) << '\n';
  }
  return 0;
}

struct SweepArgs {
  std::string axis;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
  std::string axis2;
  double start2 = 0.0;
  double stop2 = 0.0;
  std::size_t count2 = 0;
  std::string out_path = "-";
};

mfbm::SweepAxis parse_axis(const std::string& name) {
  static const std::map<std::string, mfbm::SweepAxis> axes{
      {"hurst", mfbm::SweepAxis::hurst},
      {"sigma_j", mfbm::SweepAxis::sigma_j},
      {"mu_j", mfbm::SweepAxis::mu_j},
      {"strike", mfbm::SweepAxis::strike},
      {"maturity", mfbm::SweepAxis::maturity}};
  return axes.at(name);
}

int run_sweep(const ContractArgs& args, const SweepArgs& sweep_args) {
  require_core_fields(args);
  mfbm::SweepSpec spec;
  spec.base_model = args.model;
  spec.base_contract = args.contract();
  spec.axis = parse_axis(sweep_args.axis);
  spec.start = sweep_args.start;
  spec.stop = sweep_args.stop;
  spec.count = sweep_args.count;
  if (!sweep_args.axis2.empty()) {
    spec.second_axis = parse_axis(sweep_args.axis2);
    spec.start2 = sweep_args.start2;
    spec.stop2 = sweep_args.stop2;
    spec.count2 = sweep_args.count2;
  }
  const std::vector<mfbm::SweepRow> rows = mfbm::run_sweep(spec);
  const std::string csv = mfbm::sweep_csv(spec, rows);
  if (sweep_args.out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream file(sweep_args.out_path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open output file " + sweep_args.out_path);
    file << csv;
  }
  return 0;
}

struct ValidateArgs {
  std::string oracle = "conditional";
  std::string grid = "small";
  std::uint64_t seed = 42;
  std::size_t samples = 0;  // 0 = preset default
  std::size_t paths = 0;
  std::size_t steps = 256;
  unsigned threads = 1;
  std::string generator = "cholesky";
};

void print_report_header() {
  std::printf("%-34s %14s %14s %12s %8s  %s\n", "case", "analytic", "oracle",
              "std_error", "z", "status");
}

void print_report(const mfbm::CaseReport& r) {
  std::printf("%-34s %14.8f %14.8f %12.3e %8.3f  %s\n", r.name.c_str(), r.analytic,
              r.oracle_mean, r.std_error, r.z,
              r.informational ? "info" : (r.ok ? "ok" : "FAIL"));
}

int run_validate(const ValidateArgs& va) {
  const mfbm::GridPreset preset =
      va.grid == "full" ? mfbm::GridPreset::full : mfbm::GridPreset::small;
  bool all_ok = true;

  if (va.oracle == "conditional") {
    const std::size_t samples =
        va.samples ? va.samples : (preset == mfbm::GridPreset::full ? 1000000 : 200000);
    std::printf("conditional-lognormal oracle, grid=%s, samples=%zu, seed=%llu\n",
                va.grid.c_str(), samples,
                static_cast<unsigned long long>(va.seed));
    print_report_header();
    for (const mfbm::ValidationCase& vc : mfbm::conditional_grid(preset)) {
      const mfbm::CaseReport r = mfbm::run_conditional_case(vc, samples, va.seed);
      print_report(r);
      all_ok = all_ok && r.ok;
    }
    std::printf("\nbound ordering (arithmetic twins): C_lower <= approx <= C_upper\n");
    for (const mfbm::ValidationCase& vc : mfbm::conditional_grid(preset)) {
      if (vc.contract.kind != mfbm::OptionKind::call) continue;
      const mfbm::BoundReport b = mfbm::run_bound_case(vc);
      std::printf("%-34s %14.8f %14.8f %14.8f  %s\n", b.name.c_str(), b.lower,
                  b.approx, b.upper, b.ok ? "ok" : "FAIL");
      all_ok = all_ok && b.ok;
    }
  } else {
    mfbm::McConfig config;
    config.n_paths = va.paths ? va.paths : (preset == mfbm::GridPreset::full ? 200000 : 100000);
    config.n_steps = va.steps;
    config.seed = va.seed;
    config.generator = va.generator == "circulant" ? mfbm::FgnGenerator::circulant
                                                   : mfbm::FgnGenerator::cholesky;
    std::printf("path oracle, grid=%s, paths=%zu, steps=%zu, seed=%llu\n",
                va.grid.c_str(), config.n_paths, config.n_steps,
                static_cast<unsigned long long>(va.seed));
    print_report_header();
    for (const mfbm::ValidationCase& vc : mfbm::path_grid(preset)) {
      const mfbm::CaseReport r = mfbm::run_path_case(vc, config, va.threads);
      print_report(r);
      all_ok = all_ok && r.ok;
    }
    if (preset == mfbm::GridPreset::full) {
      std::printf("\ninfo rows report the model-level gap of the closed forms\n");
      std::printf("(jump timing and fractional averaging are approximated).\n");
    }
  }
  std::printf("\n%s\n", all_ok ? "validation passed" : "validation FAILED");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asian (power) option pricing under mixed fractional Brownian "
               "motion with log-normal Poisson jumps"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  ContractArgs price_args;
  price_args.model.s0 = std::numeric_limits<double>::quiet_NaN();
  std::string price_format = "json";
  CLI::App* price_cmd = app.add_subcommand("price", "Price one contract");
  add_contract_options(price_cmd, price_args);
  price_cmd->add_option("--format", price_format, "Output format: json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  ContractArgs sweep_base;
  sweep_base.model.s0 = std::numeric_limits<double>::quiet_NaN();
  SweepArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Price over a parameter range, CSV output");
  add_contract_options(sweep_cmd, sweep_base);
  sweep_cmd->add_option("--axis", sweep_args.axis, "Swept parameter")
      ->check(CLI::IsMember({"hurst", "sigma_j", "mu_j", "strike", "maturity"}))
      ->required();
  sweep_cmd->add_option("--start", sweep_args.start, "First axis value")->required();
  sweep_cmd->add_option("--stop", sweep_args.stop, "Last axis value")->required();
  sweep_cmd->add_option("--points,--count", sweep_args.count, "Number of axis values (>= 2)")
      ->required();
  sweep_cmd->add_option("--axis2", sweep_args.axis2, "Optional second axis (surface sweep)")
      ->check(CLI::IsMember({"hurst", "sigma_j", "mu_j", "strike", "maturity"}));
  sweep_cmd->add_option("--start2", sweep_args.start2, "First value of the second axis");
  sweep_cmd->add_option("--stop2", sweep_args.stop2, "Last value of the second axis");
  sweep_cmd->add_option("--points2,--count2", sweep_args.count2,
                        "Number of second-axis values (>= 2)");
  sweep_cmd->add_option("--out", sweep_args.out_path, "Output file, '-' for stdout")
      ->capture_default_str();

  ValidateArgs validate_args;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Compare closed forms against the Monte Carlo oracles");
  validate_cmd->add_option("--oracle", validate_args.oracle, "conditional | path")
      ->check(CLI::IsMember({"conditional", "path"}))
      ->capture_default_str();
  validate_cmd->add_option("--grid", validate_args.grid, "small | full")
      ->check(CLI::IsMember({"small", "full"}))
      ->capture_default_str();
  validate_cmd->add_option("--seed", validate_args.seed, "RNG seed")
      ->envname("MFBM_ASIAN_SEED")
      ->capture_default_str();
  validate_cmd->add_option("--samples", validate_args.samples,
                           "Samples per jump count (conditional oracle; 0 = preset)");
  validate_cmd->add_option("--paths", validate_args.paths,
                           "Monte Carlo paths (path oracle; 0 = preset)");
  validate_cmd->add_option("--steps", validate_args.steps, "Time steps (path oracle)")
      ->capture_default_str();
  validate_cmd->add_option("--threads", validate_args.threads, "Worker threads for the path engine")
      ->capture_default_str();
  validate_cmd->add_option("--generator", validate_args.generator,
                           "fBm generator: cholesky | circulant")
      ->check(CLI::IsMember({"cholesky", "circulant"}))
      ->capture_default_str();

  if (argc >= 2 && argv[1][0] != '-') {
    const std::string command = argv[1];
    if (command != "price" && command != "sweep" && command != "validate") {
      std::cerr << "error: unknown command '" << command << "'\n\n"
                << app.help() << std::flush;
      return 64;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ExtrasError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 64;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (price_cmd->parsed()) {
      apply_config_file(price_cmd, price_args);
      return run_price(price_args, price_format);
    }
    if (sweep_cmd->parsed()) {
      apply_config_file(sweep_cmd, sweep_base);
      return run_sweep(sweep_base, sweep_args);
    }
    if (validate_cmd->parsed()) return run_validate(validate_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
