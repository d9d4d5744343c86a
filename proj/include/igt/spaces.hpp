#pragma once

#include <string>
#include <vector>

#include "igt/rng.hpp"
#include "igt/types.hpp"

namespace igt {

/// Feasibility tolerance used by membership checks.
inline constexpr double kFeasTol = 1e-10;

/// Strategy/parameter space geometry shared by every solver: boxes, scaled
/// probability simplices, the nonnegative orthant, and products of these.
class Space {
 public:
  enum class Kind { Box, Simplex, NonnegativeOrthant, Product };

  static Space box(Vec lower, Vec upper);
  /// Cube [lo, hi]^dim.
  static Space box(Index dim, double lo, double hi);
  /// {z >= 0 : sum z = scale}.
  static Space simplex(Index dim, double scale = 1.0);
  static Space nonnegative_orthant(Index dim);
  static Space product(std::vector<Space> factors);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }

  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  double scale() const { return scale_; }
  const std::vector<Space>& factors() const { return factors_; }
  /// Offset of factor f inside the flat vector (Product only).
  Index factor_offset(std::size_t f) const;

  bool bounded() const;
  bool contains(const Vec& z, double tol = kFeasTol) const;

  std::string describe() const;

 private:
  Space() = default;
  Kind kind_ = Kind::Box;
  Index dim_ = 0;
  Vec lower_, upper_;   // Box
  double scale_ = 1.0;  // Simplex
  std::vector<Space> factors_;
  std::vector<Index> offsets_;
};

/// Euclidean projection onto the space. Boxes and orthants clamp, the simplex
/// uses the O(n log n) sort-and-threshold rule, products project factorwise.
/// Throws std::invalid_argument on dimension mismatch.
Vec project(const Space& space, const Vec& z);

/// Uniform sample from a compact space (boxes per coordinate, simplices via
/// exponential normalization). Throws std::invalid_argument when unbounded.
Vec sample_uniform(const Space& space, Rng& rng);

/// Box midpoint / simplex barycenter / orthant origin, factorwise for
/// products. The default solver start point.
Vec centroid(const Space& space);

}  // namespace igt
