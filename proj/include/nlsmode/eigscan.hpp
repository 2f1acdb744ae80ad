#pragma once

#include "nlsmode/operators.hpp"

namespace nlsmode {

/// Scan box for the eigenvalue search: |Re z| <= M b^{-d-1}, Im z >= -M
/// (the a-priori eigenvalue window), half-plane threshold Im z < sigma_gap,
/// and the exclusion ball |z| >= delta.
struct ScanWindow {
  double delta = 0.1;
  double sigma_gap = 0.0;
  double re_bound = 10.0;
  double im_floor = -10.0;
  double M = 10.0;

  static ScanWindow for_hb(double b, int d, double delta, double M, double sigma_minus_sc) {
    ScanWindow w;
    w.delta = delta;
    w.M = M;
    w.sigma_gap = b * sigma_minus_sc;
    w.re_bound = M * std::pow(b, -d - 1.0);
    w.im_floor = -M;
    return w;
  }
  static ScanWindow for_h0(double delta, double M) {
    ScanWindow w;
    w.delta = delta;
    w.M = M;
    w.sigma_gap = 0.0;
    w.re_bound = M;
    w.im_floor = -M;
    return w;
  }
  bool in_box(cplx z) const {
    return std::abs(z.real()) <= re_bound && z.imag() >= im_floor && z.imag() < std::max(sigma_gap, 0.25);
  }
};

enum class EigClass { Localized, ContinuumArtifact, BoundaryArtifact };

struct ClassifyThresholds {
  double loc = 0.95;        // inner-half mass fraction for "localized"
  double drift = 1e-3;      // |lambda| drift tolerance (relative to 1 + |lambda|)
  double boundary = 0.5;    // mass fraction in r >= 0.9 r_max for "boundary"
  double resonance_band = 1e-2;
  double resonance_kappa = 0.2;
};

struct EigPair {
  cplx lambda;
  double loc = 0.0;       // mass fraction in r <= r_max / 2
  double tail_mass = 0.0; // mass fraction in r >= 0.9 r_max
  double residual = 0.0;  // ||(H - lambda) v|| / (||H|| ||v||)
  double drift_h = 1e300, drift_domain = 1e300;
  double tail_kappa = 0.0, tail_beta = 0.0;
  EigClass cls = EigClass::ContinuumArtifact;
};

struct SectorScan {
  Sector sector;
  std::vector<cplx> spectrum;        // base rung, all eigenvalues
  std::vector<EigPair> candidates;   // in-box eigenpairs, refined + classified
  std::vector<EigPair> fine_candidates;  // same at the (h/2, 1.5 r_max) rung
  double b_scan = 0.0;  // profile parameter on the scan grid (H_b only)
};

struct ScanConfig {
  double h = 0.04;
  double r_max = 20.0;
  double delta = 0.1;
  double M = 10.0;
  int dense_limit = 4000;
  ClassifyThresholds thresholds;
  std::vector<int> sectors = {0, 1, 2};
  unsigned seed = 2026;
};

struct H0ScanResult {
  int d = 1;
  ScanWindow window;
  std::vector<SectorScan> sectors;
  bool pass = false;
  bool pass_fine = false;
  bool verdict_stable = false;
  int localized_violations = 0;      // localized with |lambda| > drift-tol ball
  int gap_count = 0;                 // localized in (-1,1) away from 0
  std::vector<cplx> embedded_candidates;   // localized with |Re| >= 1
  std::vector<cplx> resonance_candidates;  // near +-1 with slow decay
};

/// Theorem-1.1-type scan of H_0 across sectors with a refinement ladder.
/// `inject_well_depth` adds a Gaussian well to W_1 (fault injection).
H0ScanResult h0_mode_stability(int d, const ScanConfig& cfg, double inject_well_depth = 0.0);

struct HbScanResult {
  int d = 1;
  double b = 0.0, s_c = 0.0;
  ScanWindow window;
  std::vector<SectorScan> sectors;
  bool pass = false;
  bool pass_fine = false;
  bool verdict_stable = false;
  int localized_violations = 0;
  // distances of the near-origin localized set to the symmetry eigenvalues
  double dist_zero = 1e300, dist_m2bi = 1e300, dist_mbi = 1e300;
};

/// Theorem-1.2-type scan of H_b on the Lemma-B.1 box, symmetry eigenvalues
/// {0, -2bi} (radial) and {-bi} (l=1) exempted by matching.
HbScanResult hb_mode_stability(const ProfileB& prof, const ScanConfig& cfg,
                               double sigma_minus_sc = -1.0);

/// All eigenvalues of the realified block operator (dense dgeev).
std::vector<cplx> block_spectrum(const OperatorSetB& setb, int dense_limit = 4000);
std::vector<cplx> block_spectrum_h0(const OperatorSet0& set0, int dense_limit = 4000);

/// All eigenvalues of a hermitian scalar operator (mass-symmetrized dsyev).
std::vector<double> scalar_spectrum(const ScalarOp& op, int dense_limit = 4000);

/// Inverse-iteration refinement of one eigenpair of a complex banded block
/// operator (interleaved).  Returns the refined eigenvalue and residual, and
/// fills the eigenvector components.
struct RefineOut {
  cplx lambda;
  double residual = 0.0;
  std::vector<cplx> top, bot;
  bool converged = false;
};
RefineOut refine_eigenpair(const BlockOp& H, cplx lambda0, unsigned seed, int max_iter = 8);

EigClass classify_pair(double loc, double tail_mass, double drift_h, double drift_domain,
                       cplx lambda, const ClassifyThresholds& t);

}  // namespace nlsmode
