#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nlsmode {

struct RunConfig {
  std::string pipeline;  // ground-state | profile | coercivity | h0-scan | hb-scan |
                         // liouville-checks | all
  int d = 1;
  double p = 0.0;  // 0 -> 1 + 4/d for the ground state; profile default 5.2
  double h = 0.0, r_max = 0.0;  // 0 -> pipeline defaults
  int ladder = 2;
  double delta = 0.1;
  double M = 10.0;
  double sigma_gap_rule = -1.0;  // -1 -> sigma - s_c = b^{d+4}
  std::string out_dir = "out";
  uint64_t seed = 2026;
  std::vector<int> d_list;       // coercivity sweep; default 1..10
  std::vector<double> p_sweep;   // profile scaling-law sweep
};

/// Parse a line-oriented `key = value` file with `#` comments.  Unknown keys
/// and malformed lines raise with the line number; a missing `pipeline` key
/// raises naming it.
RunConfig parse_config_file(const std::string& path);
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value,
                     int line_no = -1);

struct CheckResult {
  std::string name;
  std::string module;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  bool seeded = false;  // depends on the sampling seed
  std::string note;
};

/// Execute a pipeline; writes summary.txt, manifest.json and per-check CSVs
/// into cfg.out_dir.  Returns 0 when every check passes, 1 otherwise.
int run_pipeline(const RunConfig& cfg);

/// Field-wise comparison of two report directories.  Checks whose `seeded`
/// flag is set are skipped when the seeds differ.  Returns 0 on PASS, 1 on
/// divergence (first divergent field in *first_divergence), 2 on schema or
/// pipeline mismatch.
int diff_reports(const std::string& dir_a, const std::string& dir_b, double tol,
                 std::string* first_divergence);

std::string format_g17(double v);

}  // namespace nlsmode
