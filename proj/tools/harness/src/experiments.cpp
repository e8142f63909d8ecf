#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "acms/coefficient.hpp"
#include "acms/diagnostics.hpp"
#include "acms/errors.hpp"
#include "acms/harness.hpp"
#include "acms/random.hpp"
#include "acms/spectral.hpp"

namespace acms {

namespace {

constexpr const char* kOutputEnv = "ACMS_OUTPUT_DIR";

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

// Checks a pattern/weight/load spec early so errors name the config key.
template <class F>
void check_field(const std::string& key, F&& f) {
  try {
    f();
  } catch (const InvalidParameter& e) {
    throw ConfigError(key, e.what());
  }
}

double relative(double e, double ref) { return ref > 0.0 ? e / ref : e; }

double skeleton_energy(const SparseMatrix& s, const Vector& v) {
  return std::sqrt(std::max(0.0, v.dot(s * v)));
}

// Interior coarse vertex nearest to the domain center and a triangle touching it.
std::pair<int, int> central_vertex(const TwoLevelMesh& mesh) {
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.coarse.num_vertices(); ++v) {
    if (mesh.vertex_dof[v] < 0) continue;
    const Point p = mesh.coarse.vertices[v];
    const double d = std::hypot(p.x - 0.5, p.y - 0.5);
    if (d < dist - 1e-14) {
      dist = d;
      best = v;
    }
  }
  if (best < 0) throw InvalidParameter("mesh has no interior coarse vertex");
  for (int t = 0; t < mesh.coarse.num_triangles(); ++t) {
    const auto& tri = mesh.coarse.triangles[t];
    if (std::find(tri.begin(), tri.end(), best) != tri.end()) return {best, t};
  }
  throw InvalidParameter("central vertex has no adjacent triangle");
}

CoefficientField field_for(const RunConfig& config, const TwoLevelMesh& mesh) {
  try {
    return build_field(mesh, PatternSpec::parse(config.coefficient), WeightSpec::parse(config.rho));
  } catch (const InvalidParameter& e) {
    throw ConfigError("coefficient", e.what());
  }
}

bool saturated(const CoarseMesh& mesh, int layers) {
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    if (static_cast<int>(patch(mesh, k, layers).elements.size()) != mesh.num_triangles()) return false;
  }
  return true;
}

}  // namespace

void RunConfig::validate() const {
  if (n < 2) throw ConfigError("n", "coarse cells per side must be >= 2");
  if (r < 1 || r > 10) throw ConfigError("r", "refinement levels must be in 1..10");
  if (j < 1) throw ConfigError("j", "patch layers must be >= 1");
  if (!(alpha_stab >= 1.0)) throw ConfigError("alpha_stab", "must be >= 1");
  if (!(target >= 0.0) || !std::isfinite(target)) {
    throw ConfigError("target", "target precision must be positive (0 selects H)");
  }
  if (bubble != "exact" && bubble != "spectral") {
    throw ConfigError("bubble", "expected 'exact' or 'spectral'");
  }
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  check_field("rho", [&] { WeightSpec::parse(rho); });
  // Value checks such as positivity happen when the field is built.
  check_field("coefficient", [&] {
    build_field(refine(build_coarse_mesh(2), 1), PatternSpec::parse(coefficient), WeightSpec::parse(rho));
  });
  check_field("load", [&] {
    if (load == "zero" || load == "sine") return;
    if (starts_with(load, "constant:")) {
      if (!std::isfinite(parse_double(load.substr(9), "load"))) {
        throw InvalidParameter("load constant must be finite");
      }
    } else if (starts_with(load, "random:")) {
      parse_int(load.substr(7), "load");
    } else {
      throw InvalidParameter("unknown load '" + load + "' (expected zero, constant:c, sine or random:seed)");
    }
  });
  if (coarse_list.empty()) throw ConfigError("coarse_list", "must not be empty");
  for (std::size_t k = 0; k < coarse_list.size(); ++k) {
    if (coarse_list[k] < 2) throw ConfigError("coarse_list", "entries must be >= 2");
    if (k > 0 && coarse_list[k] <= coarse_list[k - 1]) {
      throw ConfigError("coarse_list", "coarse sizes must increase (H decreasing)");
    }
  }
  if (layer_list.empty()) throw ConfigError("layer_list", "must not be empty");
  for (std::size_t k = 0; k < layer_list.size(); ++k) {
    if (layer_list[k] < 1) throw ConfigError("layer_list", "entries must be >= 1");
    if (k > 0 && layer_list[k] <= layer_list[k - 1]) {
      throw ConfigError("layer_list", "layers must be ascending");
    }
  }
  if (contrast_list.empty()) throw ConfigError("contrast_list", "must not be empty");
  for (std::size_t k = 0; k < contrast_list.size(); ++k) {
    if (!(contrast_list[k] >= 1.0)) throw ConfigError("contrast_list", "contrasts must be >= 1");
    if (k > 0 && contrast_list[k] <= contrast_list[k - 1]) {
      throw ConfigError("contrast_list", "contrasts must be ascending");
    }
  }
}

MethodParameters RunConfig::method_parameters() const {
  MethodParameters p;
  p.method = method;
  p.layers = j;
  p.alpha_stab = alpha_stab;
  p.target_precision = target;
  p.bubble = bubble == "spectral" ? BubbleMode::spectral : BubbleMode::exact;
  return p;
}

Vector make_load(const TwoLevelMesh& mesh, const std::string& spec) {
  if (spec == "zero") return Vector::Zero(mesh.num_fine_nodes());
  if (spec == "sine") {
    constexpr double pi = std::numbers::pi;
    return sample(mesh, [](Point p) {
      return 2.0 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y);
    });
  }
  if (starts_with(spec, "constant:")) {
    const double c = parse_double(spec.substr(9), "load");
    if (!std::isfinite(c)) throw InvalidParameter("load: constant must be finite");
    return Vector::Constant(mesh.num_fine_nodes(), c);
  }
  if (starts_with(spec, "random:")) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(parse_int(spec.substr(7), "load")));
    Vector g(mesh.num_fine_nodes());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = 2.0 * uniform01(rng) - 1.0;
    return g;
  }
  throw InvalidParameter("unknown load '" + spec + "'");
}

std::unique_ptr<Discretization> discretize(const RunConfig& config) {
  TwoLevelMesh mesh = refine(build_coarse_mesh(config.n), config.r);
  CoefficientField field = field_for(config, mesh);
  Vector g = make_load(mesh, config.load);
  return std::make_unique<Discretization>(std::move(mesh), std::move(field), std::move(g));
}

std::vector<std::string> parameter_header() {
  return {"method", "n", "r", "H", "h", "j", "alpha_stab", "target",
          "coefficient", "rho", "load", "bubble", "seed"};
}

void add_parameters(CsvTable& table, const RunConfig& config) {
  table.add(std::string(to_string(config.method)))
      .add(config.n)
      .add(config.r)
      .add(1.0 / config.n)
      .add(1.0 / (config.n * std::pow(2.0, config.r)));
  if (is_localized(config.method)) {
    table.add(config.j);
  } else {
    table.blank();
  }
  if (is_spectral(config.method)) {
    table.add(config.alpha_stab);
  } else {
    table.blank();
  }
  table.add(config.resolved_target())
      .add(config.coefficient)
      .add(config.rho)
      .add(config.load)
      .add(config.bubble)
      .add(std::to_string(config.seed));
}

namespace {

std::vector<std::string> with_parameters(std::vector<std::string> tail) {
  std::vector<std::string> h = parameter_header();
  h.insert(h.end(), tail.begin(), tail.end());
  return h;
}

}  // namespace

SolveOutcome run_solve(const RunConfig& config) {
  config.validate();
  const auto d = discretize(config);
  SolveOutcome out{.report = {},
                   .solution = {},
                   .poincare_local = local_poincare_constant(d->mesh, d->extender),
                   .kappa = local_bounds(d->field, d->mesh).kappa_max,
                   .table = CsvTable(with_parameters(
                       {"contrast", "kappa", "basis_size", "pi_modes", "delta_modes", "energy_error",
                        "l2_error", "relative_energy", "relative_l2", "harmonic_error",
                        "relative_harmonic", "g_norm", "c_pl", "bound_low_contrast",
                        "bound_spectral"}))};
  out.solution = solve_multiscale(*d, config.method_parameters());
  out.report = error_report(*d, out.solution, out.poincare_local);
  const ErrorReport& r = out.report;
  out.table.row();
  add_parameters(out.table, config);
  out.table.add(d->field.contrast())
      .add(out.kappa)
      .add(out.solution.basis_size)
      .add(out.solution.pi_modes)
      .add(out.solution.delta_modes)
      .add(r.energy)
      .add(r.l2)
      .add(r.relative_energy)
      .add(r.relative_l2)
      .add(r.harmonic_energy)
      .add(r.relative_harmonic)
      .add(r.g_norm)
      .add(out.poincare_local)
      .add(r.bound_low_contrast);
  if (is_spectral(config.method)) {
    out.table.add(r.bound_spectral);
  } else {
    out.table.blank();
  }
  return out;
}

CsvTable run_convergence(const RunConfig& config) {
  config.validate();
  CsvTable table(with_parameters({"energy_error", "relative_energy", "harmonic_error", "g_norm",
                                  "c_pl", "bound_low_contrast", "bound_spectral", "rate"}));
  double previous = 0.0;
  for (std::size_t k = 0; k < config.coarse_list.size(); ++k) {
    RunConfig c = config;
    c.n = config.coarse_list[k];
    const SolveOutcome s = run_solve(c);
    table.row();
    add_parameters(table, c);
    table.add(s.report.energy)
        .add(s.report.relative_energy)
        .add(s.report.harmonic_energy)
        .add(s.report.g_norm)
        .add(s.poincare_local)
        .add(s.report.bound_low_contrast);
    if (is_spectral(c.method)) {
      table.add(s.report.bound_spectral);
    } else {
      table.blank();
    }
    if (k > 0 && previous > 0.0 && s.report.energy > 0.0) {
      table.add(std::log2(previous / s.report.energy));
    } else {
      table.blank();
    }
    previous = s.report.energy;
  }
  return table;
}

DecayOutcome run_decay(const RunConfig& config) {
  config.validate();
  const auto d = discretize(config);
  const bool spectral = is_spectral(config.method);
  const Method ideal = spectral ? Method::nlsd : Method::nlod;
  const Method local = spectral ? Method::lsd : Method::lod;

  std::optional<SkeletonSplit> split;
  CorrectorSubspace subspace;
  if (spectral) {
    split = split_skeleton_spaces(
        edge_spectra(d->mesh, d->extender, config.resolved_target(), config.alpha_stab), d->mesh);
    subspace = CorrectorSubspace::delta(*split);
  } else {
    subspace = CorrectorSubspace::full(d->mesh);
  }
  const CorrectorSolver solver(d->mesh, d->extender, d->skeleton_matrix, std::move(subspace));
  const SkeletonSplit* split_ptr = split ? &*split : nullptr;

  const SkeletonFunction lambda_ideal = solve_skeleton(
      build_multiscale_basis(ideal, d->mesh, solver, 1, config.alpha_stab, split_ptr), *d);
  const double ideal_norm = skeleton_energy(d->skeleton_matrix, lambda_ideal.values);

  const auto [vertex, element] = central_vertex(d->mesh);
  const int vdof = d->mesh.vertex_dof[vertex];
  SkeletonFunction nu{Vector::Zero(d->mesh.num_skeleton_dofs())};
  if (spectral) {
    nu.values[vdof] = 1.0;
  } else {
    nu = coarse_hat(d->mesh, vdof);
  }
  const SkeletonFunction phi = solver.ideal(element, nu);
  const int max_layer = config.layer_list.back();
  const std::vector<double> tails = tail_energies(d->mesh.coarse, d->extender, phi, element, max_layer);

  DecayOutcome out;
  out.table = CsvTable(with_parameters({"layers", "localization_error", "relative_localization",
                                        "tail_energy", "saturated", "localization_ratio",
                                        "tail_ratio"}));
  std::vector<double> fit_loc;
  std::vector<double> fit_tail;
  for (int layers : config.layer_list) {
    const SkeletonFunction lambda_j = solve_skeleton(
        build_multiscale_basis(local, d->mesh, solver, layers, config.alpha_stab, split_ptr), *d);
    const double err = skeleton_energy(d->skeleton_matrix, lambda_ideal.values - lambda_j.values);
    const bool sat = saturated(d->mesh.coarse, layers);
    out.layers.push_back(layers);
    out.localization_error.push_back(err);
    out.relative_localization.push_back(relative(err, ideal_norm));
    out.tail_energy.push_back(tails[layers - 1]);
    out.saturated.push_back(sat);
    if (!sat) {
      fit_loc.push_back(err);
      if (tails[layers - 1] > 0.0) fit_tail.push_back(tails[layers - 1]);
    }
  }
  out.localization_fit = fit_geometric(fit_loc);
  out.tail_fit = fit_geometric(fit_tail);

  RunConfig row_config = config;
  row_config.method = local;
  for (std::size_t k = 0; k < out.layers.size(); ++k) {
    row_config.j = out.layers[k];
    out.table.row();
    add_parameters(out.table, row_config);
    out.table.add(out.layers[k])
        .add(out.localization_error[k])
        .add(out.relative_localization[k])
        .add(out.tail_energy[k])
        .add(out.saturated[k] ? 1 : 0);
    if (out.localization_fit.points >= 2) {
      out.table.add(out.localization_fit.ratio);
    } else {
      out.table.blank();
    }
    if (out.tail_fit.points >= 2) {
      out.table.add(out.tail_fit.ratio);
    } else {
      out.table.blank();
    }
  }
  return out;
}

ContrastOutcome run_contrast_sweep(const RunConfig& config) {
  config.validate();
  const PatternSpec base = PatternSpec::parse(config.coefficient);
  if (base.kind == PatternSpec::Kind::constant || base.kind == PatternSpec::Kind::tensor) {
    throw ConfigError("coefficient", "contrast sweep needs a pattern with a contrast parameter");
  }
  ContrastOutcome out;
  out.table = CsvTable(with_parameters({"contrast", "kappa", "lod_relative_energy",
                                        "lsd_relative_energy", "lod_energy", "lsd_energy",
                                        "pi_modes", "max_pi_per_edge"}));
  out.pi_counts = CsvTable({"contrast", "edge", "pi_count"});
  for (double c : config.contrast_list) {
    RunConfig rc = config;
    rc.coefficient = base.with_contrast(c).to_string();
    const auto d = discretize(rc);

    MethodParameters lod = rc.method_parameters();
    lod.method = Method::lod;
    MethodParameters lsd = lod;
    lsd.method = Method::lsd;
    const ErrorReport e_lod = error_report(*d, solve_multiscale(*d, lod));
    const ErrorReport e_lsd = error_report(*d, solve_multiscale(*d, lsd));

    const auto spectra =
        edge_spectra(d->mesh, d->extender, rc.resolved_target(), rc.alpha_stab);
    int total = 0;
    int most = 0;
    for (const EdgeSpectralBasis& b : spectra) {
      total += b.num_pi;
      most = std::max(most, b.num_pi);
      out.pi_counts.row().add(c).add(b.edge).add(b.num_pi);
    }

    out.contrast.push_back(c);
    out.lod_error.push_back(e_lod.relative_energy);
    out.lsd_error.push_back(e_lsd.relative_energy);
    out.pi_modes.push_back(total);

    rc.method = Method::lsd;
    out.table.row();
    add_parameters(out.table, rc);
    out.table.add(c)
        .add(local_bounds(d->field, d->mesh).kappa_max)
        .add(e_lod.relative_energy)
        .add(e_lsd.relative_energy)
        .add(e_lod.energy)
        .add(e_lsd.energy)
        .add(total)
        .add(most);
  }
  return out;
}

CsvTable run_spectrum(const RunConfig& config) {
  config.validate();
  const TwoLevelMesh mesh = refine(build_coarse_mesh(config.n), config.r);
  const CoefficientField field = field_for(config, mesh);
  const HarmonicExtender extender(mesh, field);
  CsvTable table({"n", "r", "target", "alpha_stab", "coefficient", "edge", "i", "alpha", "tag",
                  "pencil_residual", "regularized"});
  for (int e = 0; e < mesh.coarse.num_edges(); ++e) {
    if (mesh.coarse.edges[e].on_boundary()) continue;
    const EdgeBlocks blocks = edge_blocks(mesh, extender, e, config.resolved_target());
    const EdgeSpectralBasis basis = edge_eigensolve(blocks, config.alpha_stab);
    for (int i = 0; i < basis.size(); ++i) {
      table.row()
          .add(config.n)
          .add(config.r)
          .add(config.resolved_target())
          .add(config.alpha_stab)
          .add(config.coefficient)
          .add(e)
          .add(i)
          .add(basis.eigenvalues[i])
          .add(std::string(i < basis.num_pi ? "pi" : "delta"))
          .add(pencil_residual(blocks, basis, i))
          .add(basis.regularized ? 1 : 0);
    }
  }
  return table;
}

DiagnosticsOutcome run_diagnostics(const RunConfig& config) {
  config.validate();
  const TwoLevelMesh mesh = refine(build_coarse_mesh(config.n), config.r);
  const CoefficientField field = field_for(config, mesh);
  const HarmonicExtender extender(mesh, field);
  DiagnosticsOutcome out{diagnostics(mesh, field, extender, config.samples, config.seed),
                         CsvTable(with_parameters({"log_H_over_h", "c_pl", "c_pl_squared", "c_pg",
                                                   "kappa", "overlap_constant", "max_face_ratio",
                                                   "max_interpolation_ratio"}))};
  const DiagnosticsRecord& r = out.record;
  out.table.row();
  add_parameters(out.table, config);
  out.table.add(std::log(static_cast<double>(mesh.subdivisions)))
      .add(r.poincare_local)
      .add(r.poincare_local * r.poincare_local)
      .add(r.poincare_global)
      .add(r.kappa)
      .add(r.overlap)
      .add(r.max_face_ratio)
      .add(r.max_interpolation_ratio);
  return out;
}

std::filesystem::path output_directory(const RunConfig& config) {
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::filesystem::path(config.output_dir);
}

}  // namespace acms
