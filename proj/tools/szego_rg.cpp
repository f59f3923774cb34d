#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <szego/cli.hpp>

int main(int argc, char** argv) {
  CLI::App app{"Szego RG experiments: NLW simulation, error scaling, kernel audit, growth studies"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool svg = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
    sub->add_option("--seed", seed, "seed for seeded data and the audit (overrides run.seed)");
    sub->add_flag("--svg", svg, "also write SVG plots");
  };
  for (auto [name, help] : {std::pair{"simulate", "integrate one flow and record norms and invariants"},
                            std::pair{"scaling", "error-vs-eps sweep with log-log fit"},
                            std::pair{"audit", "closed forms against brute force"},
                            std::pair{"growth", "F_osc growth or Sobolev growth study"}})
    add_common(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : szego::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommand(command);
  szego::RunConfig cfg;
  try {
    const auto kind = szego::default_kind_for(command);
    cfg = config_path.empty() ? szego::default_config(kind) : szego::load_config(config_path, kind);
    if (sub->count("--out")) cfg.output_dir = out_dir;
    if (sub->count("--seed")) szego::set_seed(cfg, seed);
    if (svg) cfg.emit_svg = true;
  } catch (const szego::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return szego::kExitConfig;
  }
  return szego::run_command(command, cfg, std::cout, std::cerr);
}
