#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cpi/errors.hpp"
#include "cpi/kernels/kernels.hpp"
#include "cpi/runner.hpp"
#include "cpi/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cpisim: correlation plenoptic imaging simulator"};
  std::string target;
  std::string out_dir = ".";
  int threads = 0;
  std::string path;
  std::string mode;
  bool print_scenario = false;
  app.add_option("scenario", target, "scenario file, or a preset: fig3 fig4 fig5 dof")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--path", path, "evaluation path override")->check(CLI::IsMember({"oracle", "fast"}));
  app.add_option("--mode", mode, "run mode override")
      ->check(CLI::IsMember({"ghost", "misfocus", "refocus", "viewpoint", "dof", "sweep"}));
  app.add_flag("--print-scenario", print_scenario, "print the canonical scenario and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const bool from_file = std::filesystem::exists(target);
    const cpi::Scenario sc = !from_file && cpi::is_preset(target) ? cpi::preset(target) : cpi::load_scenario(target);
    if (print_scenario) {
      std::cout << cpi::serialize(sc);
      return 0;
    }
    cpi::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    if (!path.empty()) opt.path = cpi::parse_eval_path(path);
    if (!mode.empty()) opt.mode = cpi::parse_run_mode(mode);
    const cpi::RunResult r = cpi::run_scenario(sc, opt);
    if (!r.report.empty()) std::cout << r.report;
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& a : r.artifacts) std::cout << a.string() << '\n';
    std::cerr << "kernels: " << cpi::kernels::isa_name(cpi::kernels::active_isa()) << '\n';
    return 0;
  } catch (const cpi::ValidationError& e) {
    std::cerr << "cpisim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cpisim: " << e.what() << '\n';
    return 1;
  }
}
