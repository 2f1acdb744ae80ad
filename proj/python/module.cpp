#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlsmode/coercivity.hpp"
#include "nlsmode/eigscan.hpp"
#include "nlsmode/liouville.hpp"
#include "nlsmode/report.hpp"

namespace py = pybind11;
using namespace nlsmode;

namespace {

py::dict grid_info(int d, int sector, double h, double r_max) {
  auto g = make_grid(d, Sector::ell(sector), h, r_max);
  std::vector<double> ones(g.n(), 1.0);
  py::dict out;
  out["n"] = g.n();
  out["h"] = g.h;
  out["r_max"] = g.r_max;
  out["quadrature_of_one"] = quadrature(g, ones);
  return out;
}

py::dict ground_state(int d, double p, double h, double r_max) {
  auto g = make_grid(d, Sector::radial(), h, r_max);
  auto pack = solve_ground_state(d, p, g, 1e-10);
  derive_profiles(pack);
  py::dict out;
  out["q0"] = pack.shoot_value;
  out["residual2"] = pack.residual2;
  out["tail_kappa"] = pack.tail.kappa;
  out["tail_beta"] = pack.tail.beta;
  out["nodes"] = pack.grid.nodes;
  out["q"] = pack.q;
  const double rhoq = inner_w(pack.grid, pack.rho, pack.q);
  const double xq2 = inner_w(pack.grid_l1, pack.xq, pack.xq);
  out["identity_2_2_error"] = std::abs(rhoq - 0.5 * xq2) / xq2;
  return out;
}

py::dict profile(int d, double p, double b_guess, double a0_guess, double h, double r_max) {
  auto g = make_grid(d, Sector::radial(), h, r_max);
  auto prof = solve_profile(d, p, b_guess, a0_guess, g, 1e-9);
  py::dict out;
  out["b"] = prof.b;
  out["a0"] = prof.a0;
  out["s_c"] = prof.s_c;
  out["residual"] = prof.residual;
  out["tail_power"] = prof.tail.beta;
  return out;
}

py::dict coercivity_min(int d, const std::string& op, int sector, double h, double r_max) {
  auto g = make_grid(d, Sector::radial(), h, r_max);
  auto gs = solve_ground_state(d, 1.0 + 4.0 / d, g, 1e-10);
  derive_profiles(gs);
  CoercivitySpec spec;
  spec.d = d;
  spec.sector = Sector::ell(sector);
  spec.mu = mu_d(d, spec.sector);
  if (op == "L1") spec.op = CoercOp::L1;
  else if (op == "L2") spec.op = CoercOp::L2;
  else if (op == "L+") { spec.op = CoercOp::Lplus; spec.norm = CoercNorm::H1; }
  else if (op == "L-") { spec.op = CoercOp::Lminus; spec.norm = CoercNorm::H1; }
  else throw std::invalid_argument("coercivity_min: op must be L1, L2, L+ or L-");
  auto rep = constrained_min(gs, spec);
  py::dict out;
  out["lambda_min"] = rep.lambda_min;
  out["lambda_min_unconstrained"] = rep.lambda_min_unconstrained;
  out["kkt_residual"] = rep.kkt_residual;
  out["n_constraints"] = rep.n_constraints;
  return out;
}

py::dict psi_check(const std::vector<double>& b_list) {
  auto rep = psi_inequality_check(b_list);
  py::dict out;
  out["pass"] = rep.pass;
  out["band_ratio"] = rep.band_ratio;
  py::list consts, validity;
  for (auto& r : rep.rows) {
    consts.append(r.constant);
    validity.append(r.validity);
  }
  out["constants"] = consts;
  out["validity_constants"] = validity;
  return out;
}

py::dict h0_scan(int d, double h, double r_max) {
  ScanConfig cfg;
  cfg.h = h;
  cfg.r_max = r_max;
  auto res = h0_mode_stability(d, cfg);
  py::dict out;
  out["pass"] = res.pass;
  out["verdict_stable"] = res.verdict_stable;
  out["gap_count"] = res.gap_count;
  return out;
}

int run_pipeline_py(const py::dict& kv) {
  RunConfig cfg;
  for (auto item : kv)
    apply_config_kv(cfg, py::str(item.first).cast<std::string>(),
                    py::str(item.second).cast<std::string>());
  if (cfg.pipeline.empty()) throw std::invalid_argument("config: missing key 'pipeline'");
  return run_pipeline(cfg);
}

}  // namespace

PYBIND11_MODULE(nlsmode_py, m) {
  m.doc() = "radial NLS mode-stability toolkit: ground states, self-similar profiles, "
            "coercivity pencils and spectral scans";
  m.def("grid_info", &grid_info, py::arg("d"), py::arg("sector"), py::arg("h"), py::arg("r_max"));
  m.def("ground_state", &ground_state, py::arg("d"), py::arg("p"), py::arg("h") = 2e-3,
        py::arg("r_max") = 20.0);
  m.def("profile", &profile, py::arg("d"), py::arg("p"), py::arg("b_guess") = 0.7,
        py::arg("a0_guess") = 1.4, py::arg("h") = 1e-3, py::arg("r_max") = 24.0);
  m.def("wkb_envelope", &wkb_envelope, py::arg("b"), py::arg("r"));
  m.def("coercivity_min", &coercivity_min, py::arg("d"), py::arg("op"), py::arg("sector") = 0,
        py::arg("h") = 0.05, py::arg("r_max") = 12.0);
  m.def("psi_check", &psi_check, py::arg("b_list"));
  m.def("h0_scan", &h0_scan, py::arg("d"), py::arg("h") = 0.08, py::arg("r_max") = 12.0);
  m.def("run_pipeline", &run_pipeline_py, py::arg("config"));
}
