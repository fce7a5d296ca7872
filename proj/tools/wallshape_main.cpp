#include <CLI11.hpp>

#include "wallshape/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acoustic wall toolkit: Robin damping fit, Helmholtz solves and "
               "wall shape optimization"};
  app.require_subcommand(1);

  wallshape::CliOptions opt;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "TOML configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_flag("--verify", opt.verify, "print oracle comparison where available");
    return sub;
  };

  auto* fit = add_common(app.add_subcommand("fit-alpha", "fit alpha(omega) over the frequency list"));
  auto* slv = add_common(app.add_subcommand("solve", "solve one Helmholtz problem and report energies"));
  auto* opt_cmd = add_common(app.add_subcommand("optimize", "optimize the wall shape"));
  auto* swp = add_common(app.add_subcommand("sweep", "fit + solve across the frequency list"));

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {fit, slv, opt_cmd, swp}) {
    if (!sub->parsed()) continue;
    if (sub->count("--out")) opt.out_dir = out_dir;
    if (sub->count("--seed")) opt.seed = seed;
  }

  if (fit->parsed()) return wallshape::cmd_fit_alpha(opt);
  if (slv->parsed()) return wallshape::cmd_solve(opt);
  if (opt_cmd->parsed()) return wallshape::cmd_optimize(opt);
  if (swp->parsed()) return wallshape::cmd_sweep(opt);
  return 2;
}
