#pragma once

// Orthogonal-array checks by direct projection counting. These do not touch
// the moment matrices, so they serve as an independent oracle for the
// strength read off a wordlength pattern.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gma/factorial.hpp"

namespace gma {

/// Coefficient magnitude treated as zero.
inline constexpr double kCoefficientTol = 1e-8;

/// Level-combination counts of a design projected onto a factor subset.
struct ProjectionReport {
  std::vector<int> factors;  // 0-based, strictly increasing
  /// Every level combination of the projected factors, observed or not.
  std::map<std::vector<int>, std::int64_t> counts;
  bool uniform = false;
  /// Common count when uniform.
  std::optional<std::int64_t> replicate;
};

/// Projects the runs onto the given 0-based factors. Throws
/// std::invalid_argument when the subset is empty, unsorted or out of range.
ProjectionReport project(const DesignMatrix& design, const FactorSpec& spec,
                         std::span<const int> factors);

/// First t-subset (in lexicographic order) whose projection is not a
/// replicated full factorial, or nullopt when the design has strength t.
std::optional<ProjectionReport> first_failing_projection(
    const DesignMatrix& design, const FactorSpec& spec, int t);

/// True iff every t-factor projection is a replicated full factorial.
bool is_oa_of_strength(const DesignMatrix& design, const FactorSpec& spec, int t);

/// Largest t with is_oa_of_strength(design, t), 0 when there is none.
int projection_strength(const DesignMatrix& design, const FactorSpec& spec);

/// Largest t with |c_a| <= tol for every 1 <= |a|_0 <= t.
int strength_by_coefficients(const CountingVector& y,
                             const ExponentLattice& lattice,
                             double tol = kCoefficientTol);

/// All t-subsets of {0, ..., m-1} in lexicographic order.
std::vector<std::vector<int>> factor_subsets(int m, int t);

}  // namespace gma
