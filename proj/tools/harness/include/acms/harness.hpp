#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "acms/corrector.hpp"
#include "acms/diagnostics.hpp"
#include "acms/io.hpp"
#include "acms/methods.hpp"

namespace acms {

/// Invalid configuration value; `field()` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Every parameter of a run. Keys in config files and `--key` flags use the
/// member names.
struct RunConfig {
  int n = 8;
  int r = 3;
  Method method = Method::lod;
  int j = 2;
  double alpha_stab = 4.0;
  /// Target precision; 0 means H.
  double target = 0.0;
  std::string coefficient = "constant:1";
  std::string rho = "constant:1";
  /// zero | constant:c | sine | random:seed
  std::string load = "sine";
  std::string bubble = "exact";
  std::string output_dir = "results";
  std::uint64_t seed = 1;
  int samples = 8;
  std::vector<int> coarse_list{4, 8, 16};
  std::vector<int> layer_list{1, 2, 3, 4, 5};
  std::vector<double> contrast_list{1.0, 1e3, 1e6};

  void validate() const;
  double resolved_target() const { return target > 0.0 ? target : 1.0 / n; }
  MethodParameters method_parameters() const;
};

/// Right-hand side g at the fine nodes.
Vector make_load(const TwoLevelMesh& mesh, const std::string& spec);

/// Mesh, field and load for `config`, optionally with another coarse size.
std::unique_ptr<Discretization> discretize(const RunConfig& config);

/// Leading parameter columns shared by every table.
std::vector<std::string> parameter_header();
void add_parameters(CsvTable& table, const RunConfig& config);

struct SolveOutcome {
  ErrorReport report;
  MultiscaleSolution solution;
  double poincare_local = 0.0;
  double kappa = 1.0;
  CsvTable table;
};

SolveOutcome run_solve(const RunConfig& config);

/// One row per coarse size in `coarse_list` (ascending n, fixed r so H/h is
/// fixed); rate_k = log2(e_{k-1} / e_k), blank when undefined.
CsvTable run_convergence(const RunConfig& config);

struct DecayOutcome {
  std::vector<int> layers;
  std::vector<double> localization_error;    // |T(lambda_ms - lambda_ms_j)|
  std::vector<double> relative_localization;
  std::vector<double> tail_energy;           // E_j of the ideal corrector
  std::vector<bool> saturated;
  GeometricFit localization_fit;
  GeometricFit tail_fit;
  CsvTable table{{}};
};

/// Ideal vs localized solutions of the method family of `config.method`
/// (NLOD/LOD or NLSD/LSD) over `layer_list`.
DecayOutcome run_decay(const RunConfig& config);

struct ContrastOutcome {
  std::vector<double> contrast;
  std::vector<double> lod_error;
  std::vector<double> lsd_error;
  std::vector<int> pi_modes;
  CsvTable table{{}};
  /// contrast, edge, pi count
  CsvTable pi_counts{{}};
};

/// Paired LOD/LSD relative energy errors over `contrast_list`.
ContrastOutcome run_contrast_sweep(const RunConfig& config);

/// Edge eigenvalues: edge, i, alpha, tag (pi or delta), pencil residual.
CsvTable run_spectrum(const RunConfig& config);

/// One row of constants; the record is returned as well.
struct DiagnosticsOutcome {
  DiagnosticsRecord record;
  CsvTable table;
};
DiagnosticsOutcome run_diagnostics(const RunConfig& config);

/// Output directory: ACMS_OUTPUT_DIR if set, else config.output_dir.
std::filesystem::path output_directory(const RunConfig& config);

/// Command-line entry point. Returns 0 on success, 1 on numerical failure and
/// 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace acms
