#pragma once

// Full factorial designs over mixed-level factors, the exponent lattice
// Z_{n_1} x ... x Z_{n_m}, and conversions between counting vectors and
// explicit run lists.
//
// Design points are always represented by integer level tuples z with
// z_k in {0, ..., n_k - 1}. The complex coding zeta_k = exp(i 2 pi z_k / n_k)
// is implied and never stored.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gma {

/// Raised when a factorial would exceed the configured point cap.
class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxPoints = 4096;

/// Level counts (n_1, ..., n_m) of a full factorial design.
class FactorSpec {
 public:
  /// Throws std::invalid_argument unless m >= 1 and every n_j >= 2.
  explicit FactorSpec(std::vector<int> levels);

  const std::vector<int>& levels() const { return levels_; }
  int factor_count() const { return static_cast<int>(levels_.size()); }
  int levels_of(int factor) const { return levels_[factor]; }

  /// Number of points #D = prod n_j, saturated at SIZE_MAX on overflow.
  std::size_t point_count() const { return point_count_; }

  /// lcm(n_1, ..., n_m); all character phases are multiples of 2 pi / lcm.
  int lcm() const { return lcm_; }

  std::string to_string() const;

  friend bool operator==(const FactorSpec& a, const FactorSpec& b) {
    return a.levels_ == b.levels_;
  }

 private:
  std::vector<int> levels_;
  std::size_t point_count_ = 1;
  int lcm_ = 1;
};

/// Parses "2,3,3,3" into a FactorSpec.
FactorSpec parse_levels(const std::string& text);

/// All points of Z_{n_1} x ... x Z_{n_m} in lexicographic order (last factor
/// varies fastest). The same ordered list indexes design points and the
/// multi-indices alpha of the monomial basis.
class ExponentLattice {
 public:
  ExponentLattice(FactorSpec spec, std::size_t max_points);

  const FactorSpec& spec() const { return spec_; }
  std::size_t size() const { return size_; }
  int width() const { return spec_.factor_count(); }

  std::span<const int> row(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(width()),
            static_cast<std::size_t>(width())};
  }

  /// Inverse of row(): mixed-radix rank of a level tuple. Throws
  /// std::out_of_range if a coordinate is outside its factor's range.
  std::size_t index_of(std::span<const int> z) const;

 private:
  FactorSpec spec_;
  std::size_t size_;
  std::vector<int> coords_;
};

ExponentLattice enumerate_lattice(const FactorSpec& spec,
                                  std::size_t max_points = kDefaultMaxPoints);

/// Number of nonzero components of a multi-index.
int weight(std::span<const int> alpha);

/// Multiplicity of every lattice point in a fraction, in lattice order.
struct CountingVector {
  std::vector<std::int64_t> counts;

  CountingVector() = default;
  explicit CountingVector(std::vector<std::int64_t> c) : counts(std::move(c)) {}

  std::size_t size() const { return counts.size(); }
  std::int64_t operator[](std::size_t i) const { return counts[i]; }
  std::int64_t& operator[](std::size_t i) { return counts[i]; }

  /// N = sum of counts.
  std::int64_t runs() const;
  /// Sum of squared counts; equals N exactly when the fraction has no repeats.
  std::int64_t sum_of_squares() const;

  friend bool operator==(const CountingVector&, const CountingVector&) = default;
  friend auto operator<=>(const CountingVector& a, const CountingVector& b) {
    return a.counts <=> b.counts;
  }
};

/// Throws std::invalid_argument when the vector does not fit the lattice, has
/// a negative entry, or sums to zero.
void validate_counting_vector(const CountingVector& y,
                              const ExponentLattice& lattice);

/// Explicit run list: one row of level indices per run.
struct DesignMatrix {
  std::vector<std::vector<int>> runs;

  std::size_t run_count() const { return runs.size(); }
  friend bool operator==(const DesignMatrix&, const DesignMatrix&) = default;
};

/// Lists lattice row i exactly y_i times, in lattice order.
DesignMatrix expand(const CountingVector& y, const ExponentLattice& lattice);

/// Counts occurrences of each lattice row. Throws std::out_of_range with the
/// offending row/column when a level index is outside its range.
CountingVector compress(const DesignMatrix& design,
                        const ExponentLattice& lattice);

/// Indicator of the full factorial (all ones).
CountingVector full_factorial(const ExponentLattice& lattice);

}  // namespace gma
