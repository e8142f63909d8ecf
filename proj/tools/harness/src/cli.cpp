#include <CLI11.hpp>
#include <exception>
#include <ostream>
#include <sstream>

#include "acms/errors.hpp"
#include "acms/harness.hpp"

namespace acms {

namespace {

template <class T, class Parse>
std::vector<T> parse_list(const std::string& text, const std::string& key, Parse&& parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(key, "empty list entry");
    try {
      out.push_back(parse(item.substr(b, e - b + 1)));
    } catch (const InvalidParameter& ex) {
      throw ConfigError(key, ex.what());
    }
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_number(v[k]);
  return s;
}

// Raw option values; typed conversion happens afterwards so errors name the key.
struct RawOptions {
  std::string method;
  std::string coarse_list;
  std::string layer_list;
  std::string contrast_list;
};

void emit(const CsvTable& table, const std::filesystem::path& path, bool append, std::ostream& out) {
  std::filesystem::create_directories(path.parent_path());
  if (append) {
    table.append_to(path);
  } else {
    table.write_atomic(path);
  }
  table.write(out);
  out << "# wrote " << path.string() << '\n';
}

int dispatch(const std::string& command, const RunConfig& config, std::ostream& out,
             std::ostream& err) {
  const std::filesystem::path dir = output_directory(config);
  if (command == "solve") {
    if (!is_localized(config.method)) {
      err << "note: j is ignored for " << to_string(config.method) << '\n';
    }
    emit(run_solve(config).table, dir / "solve.csv", true, out);
  } else if (command == "convergence") {
    emit(run_convergence(config), dir / "convergence.csv", false, out);
  } else if (command == "decay") {
    emit(run_decay(config).table, dir / "decay.csv", false, out);
  } else if (command == "contrast") {
    const ContrastOutcome c = run_contrast_sweep(config);
    emit(c.table, dir / "contrast.csv", false, out);
    c.pi_counts.write_atomic(dir / "contrast_pi.csv");
    out << "# wrote " << (dir / "contrast_pi.csv").string() << '\n';
  } else if (command == "spectrum") {
    emit(run_spectrum(config), dir / "spectrum.csv", false, out);
  } else if (command == "diagnostics") {
    emit(run_diagnostics(config).table, dir / "diagnostics.csv", false, out);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  RawOptions raw{std::string(to_string(config.method)), join(config.coarse_list),
                 join(config.layer_list), join(config.contrast_list)};

  CLI::App app("Multiscale skeleton solvers for heterogeneous diffusion", "acms");
  app.set_config("--config", "", "Flat key = value configuration file");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--n", config.n, "Coarse cells per side");
  app.add_option("--r", config.r, "Refinement levels (H/h = 2^r)");
  app.add_option("--method", raw.method, "nlod | lod | nlsd | lsd");
  app.add_option("--j", config.j, "Patch layers for localized methods");
  app.add_option("--alpha_stab", config.alpha_stab, "Spectral threshold (>= 1)");
  app.add_option("--target", config.target, "Target precision (0 selects H)");
  app.add_option("--coefficient", config.coefficient, "Coefficient pattern");
  app.add_option("--rho", config.rho, "Weight: constant:c or a_minus");
  app.add_option("--load", config.load, "zero | constant:c | sine | random:seed");
  app.add_option("--bubble", config.bubble, "exact | spectral");
  app.add_option("--output_dir", config.output_dir, "Output directory");
  app.add_option("--seed", config.seed, "Seed for randomized checks");
  app.add_option("--samples", config.samples, "Random samples for diagnostics");
  app.add_option("--coarse_list", raw.coarse_list, "Coarse sizes for convergence");
  app.add_option("--layer_list", raw.layer_list, "Layer counts for decay");
  app.add_option("--contrast_list", raw.contrast_list, "Contrasts for the sweep");
  for (const char* name : {"solve", "convergence", "decay", "contrast", "spectrum", "diagnostics"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    try {
      config.method = parse_method(raw.method);
    } catch (const InvalidParameter& e) {
      throw ConfigError("method", e.what());
    }
    config.coarse_list = parse_list<int>(raw.coarse_list, "coarse_list",
                                         [](const std::string& s) { return parse_int(s, "coarse_list"); });
    config.layer_list = parse_list<int>(raw.layer_list, "layer_list",
                                        [](const std::string& s) { return parse_int(s, "layer_list"); });
    config.contrast_list = parse_list<double>(
        raw.contrast_list, "contrast_list",
        [](const std::string& s) { return parse_double(s, "contrast_list"); });
    config.validate();
    return dispatch(app.get_subcommands().front()->get_name(), config, out, err);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidParameter& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace acms
