#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "acms/geometry.hpp"

namespace acms {

/// Symmetric 2x2 tensor [[xx, xy], [xy, yy]].
struct Tensor2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  static Tensor2 isotropic(double c) { return {c, 0.0, c}; }
  double min_eigenvalue() const;
  double max_eigenvalue() const;
  Tensor2 scaled(double c) const { return {c * xx, c * xy, c * yy}; }
};

/// Coefficient test pattern, written as `name:arg,arg,...`:
///
///   constant:c
///   tensor:xx,xy,yy
///   checkerboard:low,high,cells
///   random_checkerboard:low,high,cells,seed      (log-uniform per cell)
///   inclusions:background,contrast,grid[,width[,offset]]
///   channel:background,contrast,count[,width]
///
/// Inclusions are axis-aligned squares of side width/grid centered at
/// ((i + 0.5 + offset)/grid, (k + 0.5 + offset)/grid); channels are horizontal
/// strips of thickness width/count centered at (k + 0.5)/count. Inside either,
/// A = background * contrast.
struct PatternSpec {
  enum class Kind { constant, tensor, checkerboard, random_checkerboard, inclusions, channel };

  Kind kind = Kind::constant;
  std::vector<double> args{1.0};

  static PatternSpec parse(std::string_view text);
  std::string to_string() const;
  /// Largest/smallest eigenvalue ratio the pattern can produce.
  double nominal_contrast() const;
  /// Same geometry with the contrast parameter replaced.
  PatternSpec with_contrast(double contrast) const;
};

/// Weight rho: `constant:c` or `a_minus` (smallest eigenvalue of A).
struct WeightSpec {
  bool a_minus = false;
  double value = 1.0;

  static WeightSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Piecewise constant A and rho, one value per fine triangle.
struct CoefficientField {
  std::vector<Tensor2> tensor;
  std::vector<double> rho;
  double a_min = 0.0;
  double a_max = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;

  double contrast() const { return a_max / a_min; }
};

struct LocalCoefficientSummary {
  std::vector<double> a_minus;
  std::vector<double> a_plus;
  std::vector<double> kappa;
  std::vector<double> rho_minus;
  std::vector<double> rho_plus;
  double kappa_max = 1.0;
};

CoefficientField build_field(const TwoLevelMesh& mesh, const PatternSpec& pattern,
                             const WeightSpec& weight = {});

/// Field from explicit per-fine-triangle values; validates positivity.
CoefficientField make_field(std::vector<Tensor2> tensor, std::vector<double> rho);

LocalCoefficientSummary local_bounds(const CoefficientField& field, const TwoLevelMesh& mesh);

}  // namespace acms
