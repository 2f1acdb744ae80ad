#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "nlsmode/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"verification pipelines for the self-similar NLS mode-stability toolkit"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");

  auto* run = app.add_subcommand("run", "execute a verification pipeline");
  run->set_help_flag("--help", "print help");
  std::string config_path, pipeline, out_dir, d_list, p_sweep;
  double p = -1, h = -1, r_max = -1, delta = -1, M = -1, sigma_rule = -1;
  int ladder = -1;
  long long seed = -1;
  std::string d_arg;
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--pipeline", pipeline,
                  "ground-state|profile|coercivity|h0-scan|hb-scan|liouville-checks|all");
  run->add_option("--d", d_arg, "dimension, or a range a..b for sweeps");
  run->add_option("--p", p, "nonlinearity exponent");
  run->add_option("--h", h, "mesh spacing");
  run->add_option("--r-max", r_max, "domain radius");
  run->add_option("--ladder", ladder, "refinement rungs");
  run->add_option("--delta", delta, "scan exclusion radius");
  run->add_option("--M", M, "a-priori window constant");
  run->add_option("--sigma-gap-rule", sigma_rule, "sigma - s_c (default b^{d+4})");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "seed for sampled checks");
  run->add_option("--d-list", d_list, "comma list / a..b range for the coercivity sweep");
  run->add_option("--p-sweep", p_sweep, "comma list for the scaling-law sweep");

  auto* diff = app.add_subcommand("diff", "compare two report directories");
  std::string dir_a, dir_b;
  double tol = 0.0;
  diff->add_option("dir_a", dir_a)->required();
  diff->add_option("dir_b", dir_b)->required();
  diff->add_option("--tol", tol, "relative tolerance for numeric fields (default exact)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      nlsmode::RunConfig cfg;
      if (!config_path.empty()) cfg = nlsmode::parse_config_file(config_path);
      if (!pipeline.empty()) cfg.pipeline = pipeline;
      if (!d_arg.empty()) {
        if (d_arg.find("..") != std::string::npos)
          nlsmode::apply_config_kv(cfg, "d_list", d_arg);
        else
          cfg.d = std::stoi(d_arg);
      }
      if (p >= 0) cfg.p = p;
      if (h >= 0) cfg.h = h;
      if (r_max >= 0) cfg.r_max = r_max;
      if (ladder >= 0) cfg.ladder = ladder;
      if (delta >= 0) cfg.delta = delta;
      if (M >= 0) cfg.M = M;
      if (sigma_rule >= 0) cfg.sigma_gap_rule = sigma_rule;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
      if (!d_list.empty()) nlsmode::apply_config_kv(cfg, "d_list", d_list);
      if (!p_sweep.empty()) nlsmode::apply_config_kv(cfg, "p_sweep", p_sweep);
      if (cfg.pipeline.empty()) {
        std::fprintf(stderr, "error: config: missing key 'pipeline'\n");
        return 2;
      }
      return nlsmode::run_pipeline(cfg);
    }
    std::string divergence;
    const int rc = nlsmode::diff_reports(dir_a, dir_b, tol, &divergence);
    if (rc == 0) {
      std::printf("PASS: reports agree\n");
    } else {
      std::printf("FAIL: first divergence at '%s'\n", divergence.c_str());
    }
    return rc;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
