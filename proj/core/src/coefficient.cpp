#include "acms/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>

#include "acms/errors.hpp"
#include "acms/random.hpp"
#include "acms/io.hpp"

namespace acms {

namespace {

struct KindName {
  PatternSpec::Kind kind;
  std::string_view name;
  std::size_t min_args;
  std::size_t max_args;
};

constexpr KindName kKinds[] = {
    {PatternSpec::Kind::constant, "constant", 1, 1},
    {PatternSpec::Kind::tensor, "tensor", 3, 3},
    {PatternSpec::Kind::checkerboard, "checkerboard", 3, 3},
    {PatternSpec::Kind::random_checkerboard, "random_checkerboard", 4, 4},
    {PatternSpec::Kind::inclusions, "inclusions", 3, 5},
    {PatternSpec::Kind::channel, "channel", 3, 4},
};

const KindName& lookup(PatternSpec::Kind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k;
  }
  throw InvalidParameter("unknown coefficient pattern kind");
}

std::vector<double> parse_numbers(std::string_view text, std::string_view context) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view token =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_double(token, context));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Point centroid(const TwoLevelMesh& mesh, int t) {
  const auto& tri = mesh.fine_triangles[t];
  Point c;
  for (int v : tri) {
    c.x += mesh.fine_vertices[v].x / 3.0;
    c.y += mesh.fine_vertices[v].y / 3.0;
  }
  return c;
}

int cell_of(double x, int cells) { return std::clamp(static_cast<int>(std::floor(x * cells)), 0, cells - 1); }

}  // namespace

double Tensor2::min_eigenvalue() const {
  const double mean = 0.5 * (xx + yy);
  const double radius = std::hypot(0.5 * (xx - yy), xy);
  return mean - radius;
}

double Tensor2::max_eigenvalue() const {
  const double mean = 0.5 * (xx + yy);
  const double radius = std::hypot(0.5 * (xx - yy), xy);
  return mean + radius;
}

PatternSpec PatternSpec::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  for (const auto& k : kKinds) {
    if (k.name != name) continue;
    PatternSpec spec;
    spec.kind = k.kind;
    spec.args = colon == std::string_view::npos
                    ? std::vector<double>{}
                    : parse_numbers(text.substr(colon + 1), "coefficient pattern");
    if (spec.args.size() < k.min_args || spec.args.size() > k.max_args) {
      throw InvalidParameter("coefficient pattern '" + std::string(name) + "' expects " +
                             std::to_string(k.min_args) + ".." + std::to_string(k.max_args) +
                             " arguments");
    }
    return spec;
  }
  throw InvalidParameter("unknown coefficient pattern '" + std::string(name) + "'");
}

std::string PatternSpec::to_string() const {
  std::ostringstream os;
  os << lookup(kind).name << ':';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ',';
    os << format_number(args[i]);
  }
  return os.str();
}

double PatternSpec::nominal_contrast() const {
  switch (kind) {
    case Kind::constant:
      return 1.0;
    case Kind::tensor:
      return Tensor2{args[0], args[1], args[2]}.max_eigenvalue() /
             Tensor2{args[0], args[1], args[2]}.min_eigenvalue();
    case Kind::checkerboard:
    case Kind::random_checkerboard:
      return std::max(args[0], args[1]) / std::min(args[0], args[1]);
    case Kind::inclusions:
    case Kind::channel:
      return std::max(args[1], 1.0 / args[1]);
  }
  return 1.0;
}

PatternSpec PatternSpec::with_contrast(double contrast) const {
  PatternSpec out = *this;
  switch (kind) {
    case Kind::checkerboard:
    case Kind::random_checkerboard:
      out.args[1] = out.args[0] * contrast;
      break;
    case Kind::inclusions:
    case Kind::channel:
      // Keep the orientation: a value below 1 marks low-conductivity features.
      out.args[1] = args[1] < 1.0 ? 1.0 / contrast : contrast;
      break;
    case Kind::constant:
    case Kind::tensor:
      throw InvalidParameter("pattern '" + to_string() + "' has no contrast parameter");
  }
  return out;
}

WeightSpec WeightSpec::parse(std::string_view text) {
  if (text == "a_minus") return WeightSpec{true, 1.0};
  const std::string_view prefix = "constant:";
  if (text.substr(0, prefix.size()) == prefix) {
    WeightSpec w;
    w.value = parse_double(text.substr(prefix.size()), "rho");
    if (!(w.value > 0.0)) throw InvalidParameter("rho: constant must be positive");
    return w;
  }
  throw InvalidParameter("unknown rho spec '" + std::string(text) + "'");
}

std::string WeightSpec::to_string() const {
  return a_minus ? std::string("a_minus") : "constant:" + format_number(value);
}

CoefficientField make_field(std::vector<Tensor2> tensor, std::vector<double> rho) {
  if (tensor.size() != rho.size() || tensor.empty()) {
    throw InvalidParameter("make_field: tensor and rho sizes differ or are empty");
  }
  CoefficientField field;
  field.a_min = std::numeric_limits<double>::infinity();
  field.a_max = 0.0;
  field.rho_min = std::numeric_limits<double>::infinity();
  field.rho_max = 0.0;
  for (std::size_t t = 0; t < tensor.size(); ++t) {
    const double lo = tensor[t].min_eigenvalue();
    const double hi = tensor[t].max_eigenvalue();
    if (!(lo > 0.0) || !std::isfinite(hi)) {
      throw InvalidParameter("make_field: tensor on fine element " + std::to_string(t) +
                             " is not positive definite");
    }
    if (!(rho[t] > 0.0) || !std::isfinite(rho[t])) {
      throw InvalidParameter("make_field: rho on fine element " + std::to_string(t) +
                             " is not positive");
    }
    field.a_min = std::min(field.a_min, lo);
    field.a_max = std::max(field.a_max, hi);
    field.rho_min = std::min(field.rho_min, rho[t]);
    field.rho_max = std::max(field.rho_max, rho[t]);
  }
  field.tensor = std::move(tensor);
  field.rho = std::move(rho);
  return field;
}

CoefficientField build_field(const TwoLevelMesh& mesh, const PatternSpec& pattern,
                             const WeightSpec& weight) {
  const auto& a = pattern.args;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool is_offset = pattern.kind == PatternSpec::Kind::inclusions && i == 4;
    const bool is_seed = pattern.kind == PatternSpec::Kind::random_checkerboard && i == 3;
    const bool is_offdiag = pattern.kind == PatternSpec::Kind::tensor && i == 1;
    if (!is_offset && !is_offdiag && !is_seed && !(a[i] > 0.0)) {
      throw InvalidParameter("build_field: pattern '" + pattern.to_string() +
                             "' has a nonpositive parameter");
    }
  }

  const int nt = static_cast<int>(mesh.fine_triangles.size());
  std::vector<Tensor2> tensor(nt);

  switch (pattern.kind) {
    case PatternSpec::Kind::constant:
      std::fill(tensor.begin(), tensor.end(), Tensor2::isotropic(a[0]));
      break;
    case PatternSpec::Kind::tensor:
      std::fill(tensor.begin(), tensor.end(), Tensor2{a[0], a[1], a[2]});
      break;
    case PatternSpec::Kind::checkerboard: {
      const int cells = static_cast<int>(a[2]);
      for (int t = 0; t < nt; ++t) {
        const Point c = centroid(mesh, t);
        const bool high = (cell_of(c.x, cells) + cell_of(c.y, cells)) % 2 == 1;
        tensor[t] = Tensor2::isotropic(high ? a[1] : a[0]);
      }
      break;
    }
    case PatternSpec::Kind::random_checkerboard: {
      const int cells = static_cast<int>(a[2]);
      std::mt19937_64 rng(static_cast<std::uint64_t>(a[3]));
      std::vector<double> value(static_cast<std::size_t>(cells) * cells);
      for (double& v : value) {
        v = a[0] * std::pow(a[1] / a[0], uniform01(rng));
      }
      for (int t = 0; t < nt; ++t) {
        const Point c = centroid(mesh, t);
        tensor[t] = Tensor2::isotropic(value[cell_of(c.y, cells) * cells + cell_of(c.x, cells)]);
      }
      break;
    }
    case PatternSpec::Kind::inclusions: {
      const int grid = static_cast<int>(a[2]);
      const double width = a.size() > 3 ? a[3] : 0.5;
      const double offset = a.size() > 4 ? a[4] : 0.0;
      for (int t = 0; t < nt; ++t) {
        const Point c = centroid(mesh, t);
        const auto inside = [&](double x) {
          const double local = x * grid - 0.5 - offset;
          return std::abs(local - std::round(local)) < 0.5 * width;
        };
        tensor[t] = Tensor2::isotropic(inside(c.x) && inside(c.y) ? a[0] * a[1] : a[0]);
      }
      break;
    }
    case PatternSpec::Kind::channel: {
      const int count = static_cast<int>(a[2]);
      const double width = a.size() > 3 ? a[3] : 0.25;
      for (int t = 0; t < nt; ++t) {
        const Point c = centroid(mesh, t);
        const double local = c.y * count - 0.5;
        const bool inside = std::abs(local - std::round(local)) < 0.5 * width;
        tensor[t] = Tensor2::isotropic(inside ? a[0] * a[1] : a[0]);
      }
      break;
    }
  }

  std::vector<double> rho(nt, weight.value);
  if (weight.a_minus) {
    for (int t = 0; t < nt; ++t) rho[t] = tensor[t].min_eigenvalue();
  }
  return make_field(std::move(tensor), std::move(rho));
}

LocalCoefficientSummary local_bounds(const CoefficientField& field, const TwoLevelMesh& mesh) {
  if (field.tensor.size() != mesh.fine_triangles.size()) {
    throw InvalidParameter("local_bounds: field does not match mesh");
  }
  const int nc = mesh.coarse.num_triangles();
  LocalCoefficientSummary s;
  s.a_minus.assign(nc, std::numeric_limits<double>::infinity());
  s.a_plus.assign(nc, 0.0);
  s.rho_minus.assign(nc, std::numeric_limits<double>::infinity());
  s.rho_plus.assign(nc, 0.0);
  for (int tau = 0; tau < nc; ++tau) {
    for (int t : mesh.element_triangles[tau]) {
      s.a_minus[tau] = std::min(s.a_minus[tau], field.tensor[t].min_eigenvalue());
      s.a_plus[tau] = std::max(s.a_plus[tau], field.tensor[t].max_eigenvalue());
      s.rho_minus[tau] = std::min(s.rho_minus[tau], field.rho[t]);
      s.rho_plus[tau] = std::max(s.rho_plus[tau], field.rho[t]);
    }
  }
  s.kappa.resize(nc);
  s.kappa_max = 1.0;
  for (int tau = 0; tau < nc; ++tau) {
    s.kappa[tau] = s.a_plus[tau] / s.a_minus[tau];
    s.kappa_max = std::max(s.kappa_max, s.kappa[tau]);
  }
  return s;
}

}  // namespace acms
