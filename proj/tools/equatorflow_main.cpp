#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "equatorflow/config.hpp"
#include "equatorflow/oracles.hpp"
#include "equatorflow/sweep.hpp"

using namespace eqf;

int main(int argc, char** argv) {
  CLI::App app{"equatorflow: spectral flow of the fibered shallow-water Hamiltonian"};
  app.require_subcommand(1);

  // run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "sweep the xi grid and compute flows");
  std::string run_config, run_preset, run_out;
  std::vector<double> run_alphas;
  run->add_option("--config", run_config, "sweep config (json)")->required();
  run->add_option("--preset", run_preset, "desk|paper grid preset");
  run->add_option("--alpha", run_alphas, "flow levels (overrides config)");
  run->add_option("--out", run_out, "output directory");

  // selftest -----------------------------------------------------------
  auto* st = app.add_subcommand("selftest", "discretization identity checks");
  std::string st_config;
  double st_break = 0.0;
  st->add_option("--config", st_config, "sweep config (json)")->required();
  st->add_option("--break-gamma", st_break,
                 "test hook: eta-diagonal offset that must break the symmetry");

  // oracle -------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "closed-form predictions");
  auto* yanai = oracle->add_subcommand("yanai", "crossing of E = -xi");
  std::string yanai_config;
  yanai->add_option("--config", yanai_config, "config with the profile")->required();
  auto* jump = oracle->add_subcommand("jump", "two-value jump mode");
  double j_fp = 1.0, j_fm = -1.0, j_xi = -2.0;
  jump->add_option("--f-plus", j_fp)->required();
  jump->add_option("--f-minus", j_fm)->required();
  jump->add_option("--xi", j_xi)->required();
  auto* kelvin = oracle->add_subcommand("kelvin", "Kelvin branch value");
  double k_xi = 0.0;
  kelvin->add_option("--xi", k_xi)->required();
  oracle->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      SweepConfig cfg = load_sweep_config(run_config);
      if (!run_preset.empty()) apply_preset(cfg, run_preset);
      if (!run_alphas.empty()) cfg.alphas = run_alphas;
      if (!run_out.empty()) cfg.out_dir = run_out;
      cfg.track.delta_xi = cfg.delta_xi;
      cfg.validate();
      SweepResult res = run_sweep(cfg);
      std::cout << res.flow_report_text();
      std::cerr << "fibers: " << res.fibers.size() << ", branches: "
                << res.branches.size() << ", wall: " << res.provenance.wall_seconds
                << " s\n";
      bool all_ok = true;
      for (const auto& fl : res.flows)
        if (!fl.reliable) all_ok = false;
      return all_ok ? 0 : 1;
    }
    if (*st) {
      SweepConfig cfg = load_sweep_config(st_config);
      SelfTestReport rep = self_test(cfg, st_break);
      for (const auto& line : rep.lines) std::cout << line << "\n";
      std::cout << (rep.pass ? "selftest: PASS\n" : "selftest: FAIL\n");
      return rep.pass ? 0 : 1;
    }
    if (*yanai) {
      SweepConfig cfg = load_sweep_config(yanai_config);
      printf("xi0 = %.10f\n", yanai_crossing(cfg.profile));
      return 0;
    }
    if (*jump) {
      auto p = jump_dispersion(j_fp, j_fm, j_xi);
      if (!p.admissible) {
        printf("no admissible mode (-f_odd*xi <= 0)\n");
        return 0;
      }
      printf("E = %.10f\nkappa_plus = %.10f\nkappa_minus = %.10f\n"
             "kappa_identity = %.3e\n",
             p.E, p.kappa_plus, p.kappa_minus, p.kappa_identity());
      return 0;
    }
    if (*kelvin) {
      printf("E = %.10f\n", kelvin_energy(k_xi));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
