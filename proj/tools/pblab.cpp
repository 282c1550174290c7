#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pblab/pipeline.hpp"
#include "pblab/types.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pblab: periodic-orbit laboratory for spatially periodic Hamiltonian systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;

  CLI::App* c_rays =
      app.add_subcommand("check-rays", "avoiding-rays test for the time-T displacement");
  CLI::App* c_orbits =
      app.add_subcommand("find-orbits", "variational search, shooting refinement and census");
  CLI::App* c_certify =
      app.add_subcommand("certify", "admissibility + rays + degree + census + oracle cross-check");
  CLI::App* c_basket =
      app.add_subcommand("basket", "build and verify the basket function and time profile");
  for (CLI::App* cmd : {c_rays, c_orbits, c_certify, c_basket}) {
    cmd->add_option("-c,--config", config_path, "configuration file")->required();
    cmd->add_option("-o,--output", output_override, "override output.dir");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 3;
  }

  try {
    pblab::RunConfig cfg = pblab::parse_config_file(config_path);
    if (!output_override.empty()) cfg.output_dir = output_override;

    pblab::CommandResult result;
    std::string name;
    if (c_rays->parsed()) {
      name = "check-rays";
      result = pblab::run_check_rays(cfg);
    } else if (c_orbits->parsed()) {
      name = "find-orbits";
      result = pblab::run_find_orbits(cfg);
    } else if (c_certify->parsed()) {
      name = "certify";
      result = pblab::run_certify(cfg);
    } else {
      name = "basket";
      result = pblab::run_basket(cfg);
    }

    for (const auto& path : pblab::write_outputs(result, cfg, name)) std::cout << path << "\n";
    std::cout << (result.exit_code == 0   ? "PASS"
                  : result.exit_code == 1 ? "FAIL"
                                          : "NOT-VERIFIABLE")
              << "\n";
    return result.exit_code;
  } catch (const pblab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const pblab::EvaluationError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return 3;
  } catch (const pblab::IntegrationError& e) {
    std::cerr << "not verifiable: " << e.what() << "\n";
    return 2;
  } catch (const pblab::UnreliableResultError& e) {
    std::cerr << "not verifiable: " << e.what() << "\n";
    return 2;
  } catch (const pblab::ReductionError& e) {
    std::cerr << "not verifiable: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
