#include "narx/error.hpp"
#include "narx/pipeline.hpp"
#include "narx/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int run(int argc, char** argv) {
  CLI::App app{"Polynomial NARX identification and SEIR epidemic tools"};
  app.set_version_flag("--version", std::string(narx::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string which;
  std::string out_dir;

  auto* identify = app.add_subcommand("identify", "identify one case-study model and write its reports");
  identify->add_option("--config", config_path, "configuration file")->required();
  identify->add_option("--case", which, "case study")->required()->check(CLI::IsMember({"cs1", "cs2", "cs3"}));
  identify->add_option("--out", out_dir, "output directory (defaults to [output] dir)");

  auto* seir = app.add_subcommand("simulate-seir", "integrate the SEIR model and write seir.csv");
  seir->add_option("--config", config_path, "configuration file")->required();
  seir->add_option("--out", out_dir, "output directory (defaults to [output] dir)");

  auto* rn = app.add_subcommand("derive-rn", "estimate beta, r and the R number from case data; write rn.csv");
  rn->add_option("--config", config_path, "configuration file")->required();
  rn->add_option("--out", out_dir, "output directory (defaults to [output] dir)");

  std::uint64_t seed = 0;
  std::string report_path;
  auto* verify = app.add_subcommand("verify", "run the synthetic recovery checks");
  verify->add_option("--seed", seed, "random seed")->required();
  verify->add_option("--out", report_path, "also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (verify->parsed()) {
    const auto report = narx::run_synthetic_suite(seed);
    const std::string text = report.text();
    std::cout << text;
    if (!report_path.empty()) {
      std::ofstream out(report_path, std::ios::binary);
      if (!out) throw narx::DataError("cannot write '" + report_path + "'");
      out << text;
    }
    return report.passed() ? 0 : 1;
  }

  const auto config = narx::load_config(config_path);
  const std::filesystem::path dir = out_dir.empty() ? config.output_dir : std::filesystem::path(out_dir);
  if (identify->parsed()) {
    const auto result = narx::run_case_study(config, which, dir);
    std::cout << which << ": " << result.model.size() << " terms, R2 train " << result.r2_train << ", test "
              << result.r2_test << "\nreports in " << result.directory.string() << '\n';
  } else if (seir->parsed()) {
    std::cout << narx::simulate_seir(config, dir).string() << '\n';
  } else if (rn->parsed()) {
    std::cout << narx::derive_rn(config, dir).string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const narx::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
