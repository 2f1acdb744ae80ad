#pragma once

#include "nlsmode/operators.hpp"

namespace nlsmode {

enum class CoercOp { Lplus, Lminus, L1, L2 };

/// Norm choice for the Rayleigh quotient denominator.
enum class CoercNorm { H1, H1dotWeighted };

struct CoercivitySpec {
  CoercOp op = CoercOp::L1;
  int d = 1;
  Sector sector;
  CoercNorm norm = CoercNorm::H1dotWeighted;
  double mu = 1.0;  // weight exponent of <r>^{-mu}
};

/// Weight exponent of Prop-2.2 type: 1 for d = 1 or d >= 3; 11/10 in d = 2
/// on the radial sector, 1 on the vanishing-average (l >= 1) sectors.
double mu_d(int d, Sector sector);

struct MinReport {
  CoercivitySpec spec;
  double lambda_min = 0.0;
  double lambda_min_unconstrained = 0.0;
  double b_min_eig = 0.0;           // smallest eigenvalue of the norm Gram
  double kkt_residual = 0.0;        // stationarity defect of the minimizer
  std::vector<double> minimizer;    // node values (active part)
  int n_constraints = 0;
};

/// Smallest constrained generalized eigenvalue of (A, B) on the orthogonal
/// complement (discrete L^2 pairing) of the sector's constraint profiles.
MinReport constrained_min(const GroundStatePack& gs, const CoercivitySpec& spec,
                          bool diagnostics = true);

/// Largest almost-orthogonality slack delta keeping the perturbation-bounded
/// lambda above half the hard-constraint value (bisection on the rank-k
/// perturbation bound).
double robustness_margin(const GroundStatePack& gs, const CoercivitySpec& spec,
                         const MinReport& hard);

struct SweepRow {
  int d = 0;
  CoercOp op = CoercOp::L1;
  int sector = 0;
  double lambda_min = 0.0;
  double lambda_half = 0.0;  // at h/2
  double drift = 0.0;        // relative
  bool pass = false;
  bool in_scope = true;
};

struct SweepOptions {
  double h = 0.02;
  double r_max = 15.0;
  double drift_tol = 0.05;
  std::vector<int> sectors = {0, 1, 2};
};

std::vector<SweepRow> coercivity_sweep(const std::vector<int>& d_list, const SweepOptions& opt);

}  // namespace nlsmode
