// gma: construct GMA-optimal mixed-level designs and check existing ones.
//
//   gma construct --levels 2,2,2,2,2 --runs 16 --mode heuristic --seed 1
//   gma evaluate design.csv
//   gma verify design.csv --strength 2
//
// Exit codes: 0 success, 1 usage or parse error, 2 infeasible / not proven /
// strength not met, 3 internal oracle disagreement.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gma/factorial.hpp"
#include "gma/gwlp.hpp"
#include "gma/report.hpp"
#include "gma/solver.hpp"
#include "gma/verify.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kNotProven = 2;
constexpr int kOracleMismatch = 3;

double default_time_budget() {
  if (const char* env = std::getenv("GMA_TIME_BUDGET")) {
    try {
      const double v = std::stod(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid GMA_TIME_BUDGET='" << env << "'\n";
  }
  return 600.0;
}

struct ConstructOptions {
  std::string levels;
  std::int64_t runs = 0;
  std::string mode = "heuristic";
  std::uint64_t seed = 1;
  double time_budget = 0.0;
  int restarts = 200;
  std::int64_t node_cap = 200'000'000;
  std::string format = "json";
  std::string output;
  std::string design_out;
  bool no_timing = false;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

int run_construct(const ConstructOptions& opt) {
  gma::SolverConfig config;
  std::optional<gma::FactorSpec> spec;
  try {
    spec = gma::parse_levels(opt.levels);
    config.mode = gma::parse_mode(opt.mode);
    config.seed = opt.seed;
    config.time_budget = opt.time_budget;
    config.restarts = opt.restarts;
    config.node_cap = opt.node_cap;
    config.validate();
    if (opt.runs < 1) throw std::invalid_argument("--runs must be at least 1");
    if (opt.format != "json" && opt.format != "csv" && opt.format != "text") {
      throw std::invalid_argument("--format must be json, csv or text");
    }
    gma::GwlpModel::shared(*spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  gma::GmaResult result;
  try {
    result = gma::solve_sequential(*spec, opt.runs, config);
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNotProven;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto model = gma::GwlpModel::shared(*spec);
  gma::ConstructReport report{*spec, opt.runs, config, result,
                              gma::expand(result.y, model->lattice())};
  if (!opt.no_timing) report.elapsed_s = elapsed;

  // Cross-check the result against the independent routes before reporting.
  const auto check = gma::evaluate_design({*spec, report.design});
  if (!check.paths_agree() || !check.strengths_agree() ||
      check.strength_wlp != result.strength) {
    std::cerr << "internal error: oracle disagreement on the constructed design\n"
              << gma::to_text(check);
    return kOracleMismatch;
  }

  std::string text;
  if (opt.format == "json") {
    text = gma::to_json(report).dump(2) + "\n";
  } else if (opt.format == "csv") {
    std::ostringstream out;
    gma::write_design(out, *spec, report.design);
    text = out.str();
  } else {
    text = gma::to_text(report);
  }
  emit(text, opt.output);
  if (!opt.design_out.empty()) {
    std::ostringstream out;
    gma::write_design(out, *spec, report.design);
    emit(out.str(), opt.design_out);
  }
  if (config.mode == gma::SolverMode::exact && !result.proven) return kNotProven;
  return 0;
}

int run_evaluate(const std::string& path, const std::string& format) {
  gma::DesignFile file{gma::FactorSpec({2}), {}};
  try {
    file = gma::read_design_file(path);
    gma::GwlpModel::shared(file.spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  const auto report = gma::evaluate_design(file);
  std::cout << (format == "json" ? gma::to_json(report).dump(2) + "\n" : gma::to_text(report));
  if (!report.paths_agree()) {
    std::cerr << "internal error: wordlength routes differ by " << report.max_discrepancy
              << '\n';
    return kOracleMismatch;
  }
  if (!report.strengths_agree()) {
    std::cerr << "internal error: strength checks disagree\n";
    return kOracleMismatch;
  }
  return 0;
}

int run_verify(const std::string& path, int strength) {
  gma::DesignFile file{gma::FactorSpec({2}), {}};
  try {
    file = gma::read_design_file(path);
    if (strength < 1 || strength > file.spec.factor_count()) {
      throw std::invalid_argument("--strength must lie in 1.." +
                                  std::to_string(file.spec.factor_count()));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  for (int t = 1; t <= strength; ++t) {
    const auto failing = gma::first_failing_projection(file.design, file.spec, t);
    if (!failing) continue;
    std::cout << "not an orthogonal array of strength " << strength << '\n';
    std::cout << "projection onto factors {";
    for (std::size_t i = 0; i < failing->factors.size(); ++i) {
      std::cout << (i ? "," : "") << failing->factors[i] + 1;
    }
    std::cout << "} is not a replicated full factorial:\n";
    for (const auto& [combo, count] : failing->counts) {
      std::cout << "  ";
      for (std::size_t i = 0; i < combo.size(); ++i) std::cout << (i ? "," : "") << combo[i];
      std::cout << ": " << count << '\n';
    }
    return kNotProven;
  }
  std::cout << "orthogonal array of strength " << strength << " ("
            << file.design.run_count() << " runs, levels " << file.spec.to_string()
            << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized minimum aberration orthogonal arrays"};
  app.require_subcommand(1);

  ConstructOptions construct;
  construct.time_budget = default_time_budget();
  auto* cmd_construct = app.add_subcommand("construct", "build a GMA-optimal design");
  cmd_construct->add_option("--levels", construct.levels, "level counts, e.g. 2,3,3,3")
      ->required();
  cmd_construct->add_option("--runs", construct.runs, "number of runs N")->required();
  cmd_construct->add_option("--mode", construct.mode, "exact or heuristic")
      ->capture_default_str();
  cmd_construct->add_option("--seed", construct.seed, "random seed")->capture_default_str();
  cmd_construct
      ->add_option("--time-budget", construct.time_budget,
                   "seconds for the whole solve (default from GMA_TIME_BUDGET or 600)")
      ->capture_default_str();
  cmd_construct->add_option("--restarts", construct.restarts, "local-search restarts per step")
      ->capture_default_str();
  cmd_construct->add_option("--node-cap", construct.node_cap, "branch-and-bound node limit")
      ->capture_default_str();
  cmd_construct->add_option("--format", construct.format, "json, csv or text")
      ->capture_default_str();
  cmd_construct->add_option("--output,-o", construct.output, "write the report here");
  cmd_construct->add_option("--design-out", construct.design_out, "also write a design file");
  cmd_construct->add_flag("--no-timing", construct.no_timing,
                          "report elapsed_s as null for byte-stable output");

  std::string evaluate_path;
  std::string evaluate_format = "text";
  auto* cmd_evaluate = app.add_subcommand("evaluate", "wordlength pattern and strength");
  cmd_evaluate->add_option("design", evaluate_path, "design file")->required();
  cmd_evaluate->add_option("--format", evaluate_format, "json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  std::string verify_path;
  int verify_strength = 0;
  auto* cmd_verify = app.add_subcommand("verify", "check orthogonal-array strength");
  cmd_verify->add_option("design", verify_path, "design file")->required();
  cmd_verify->add_option("--strength,-t", verify_strength, "required strength")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  if (*cmd_construct) return run_construct(construct);
  if (*cmd_evaluate) return run_evaluate(evaluate_path, evaluate_format);
  if (*cmd_verify) return run_verify(verify_path, verify_strength);
  return kUsage;
}
