#include <cstdio>
#include <exception>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "arraycav/common.hpp"
#include "arraycav/config.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace arraycav;
  using namespace arraycav::cli;

  CLI::App app{
      "Coupled-dipole simulator for optical cavities built from "
      "two-dimensional atom arrays"};
  app.require_subcommand(1);

  RunOptions options;
  std::map<std::string, std::function<int(const RunOptions&)>> handlers = {
      {"spectrum", cmd_spectrum},        {"cavity-params", cmd_cavity_params},
      {"transmission", cmd_transmission}, {"dynamics", cmd_dynamics},
      {"motion", cmd_motion},            {"stark", cmd_stark},
      {"mirror", cmd_mirror},
  };
  const std::map<std::string, std::string> descriptions = {
      {"spectrum", "target-atom self-energy and mode table"},
      {"cavity-params", "g, kappa, gamma_3d, C over a geometry sweep"},
      {"transmission", "cavity transmission/reflection spectra"},
      {"dynamics", "Raman transfer and exchange trajectories"},
      {"motion", "frozen/fast motion averages of the cavity parameters"},
      {"stark", "Stark-curved flat mirrors: fitted waist and parameters"},
      {"mirror", "single-mirror reflection, transmission and loss"},
  };

  std::string chosen;
  for (const auto& [name, handler] : handlers) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", options.config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--out", options.out_dir, "output directory override");
    sub->add_option("--threads", options.threads, "worker thread count");
    sub->add_option("--seed", options.seed, "RNG seed override")
        ->each([&](const std::string&) { options.seed_given = true; });
    sub->callback([&chosen, name = name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return handlers.at(chosen)(options);
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const numerical_failure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
