#pragma once

// Counting-function coefficients and the generalized wordlength pattern.
//
// Two independent routes compute the pattern of a fraction with counting
// vector Y and N runs:
//   * the character route: alpha_i = sum_{|a|_0 = i} |c_a|^2 / |c_0|^2 with
//     c_a = (1/#D) sum_z y_z conj(X^a(z)), see wlp_oracle();
//   * the quadratic route: alpha_i = Y^T H_i Y / N^2 = |U_i Y|^2 / N^2 where
//     H_i sums the real parts of conj(X^a) X^a^T over weight-i multi-indices
//     and U_i^T U_i = H_i, see wlp().
// Each one checks the other.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gma/factorial.hpp"

namespace gma {

using Coefficient = std::complex<double>;

/// Absolute tolerance on the alpha scale for deciding alpha_i == 0.
inline constexpr double kZeroTol = 1e-7;

/// c_a = (1/#D) sum_z y_z conj(X^a(z)). Phases are reduced as integers modulo
/// lcm(n_1, ..., n_m) before any trigonometric call.
Coefficient coefficient(const CountingVector& y, const ExponentLattice& lattice,
                        std::span<const int> alpha);

/// Real part of conj(X^a(z)) X^a(t):
/// cos((2 pi / n) * sum_k (n / n_k) a_k (t_k - z_k)), n = lcm of the levels.
double h_entry(const FactorSpec& spec, std::span<const int> alpha,
               std::span<const int> z, std::span<const int> t);

/// H_i = sum_{|a|_0 = i} Re(conj(X^a) X^a^T), a #D x #D PSD matrix.
struct MomentMatrix {
  int order = 0;
  /// K_i, the number of weight-i multi-indices; also every diagonal entry.
  std::int64_t weight_count = 0;
  Eigen::MatrixXd entries;
};

MomentMatrix build_moment_matrix(const ExponentLattice& lattice, int order);

/// All of H_1, ..., H_m in one pass over the difference table.
std::vector<MomentMatrix> build_moment_matrices(const ExponentLattice& lattice);

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// U with U^T U = H, one row per retained eigenpair.
struct FactorMatrix {
  int order = 0;
  Eigen::MatrixXd u;
  double largest_eigenvalue = 0.0;

  Eigen::Index rank() const { return u.rows(); }
};

/// Symmetric eigendecomposition H = V diag(l) V^T, keeping l > 1e-9 * K and
/// returning U = diag(sqrt(l)) V^T. Throws FactorizationError when the
/// reconstruction residual max|U^T U - H| exceeds 1e-8 * K.
FactorMatrix factorize(const MomentMatrix& h);

struct WordlengthPattern {
  std::vector<double> alpha;

  std::size_t size() const { return alpha.size(); }
  double operator[](std::size_t i) const { return alpha[i]; }
  double total() const;
};

/// alpha_i = |U_i Y|^2 / N^2, with factors[i - 1] holding U_i.
WordlengthPattern wlp(const CountingVector& y,
                      std::span<const FactorMatrix> factors);

/// Pattern computed directly from the complex coefficients.
WordlengthPattern wlp_oracle(const CountingVector& y,
                             const ExponentLattice& lattice);

/// Largest t with alpha_1, ..., alpha_t <= tol.
int strength_from_wlp(const WordlengthPattern& w, double tol = kZeroTol);

/// (#D / N^2) sum y_j^2 - 1, which the entries of the pattern sum to.
double parseval_total(const CountingVector& y, std::size_t point_count);

/// Lattice, moment matrices and their factors for one factorial. Immutable
/// once built, so a single instance can be shared between threads.
class GwlpModel {
 public:
  explicit GwlpModel(const FactorSpec& spec,
                     std::size_t max_points = kDefaultMaxPoints);

  /// Builds the model on first use for a given level vector, then returns the
  /// cached instance.
  static std::shared_ptr<const GwlpModel> shared(
      const FactorSpec& spec, std::size_t max_points = kDefaultMaxPoints);

  const ExponentLattice& lattice() const { return lattice_; }
  const FactorSpec& spec() const { return lattice_.spec(); }
  int order_count() const { return lattice_.width(); }
  std::size_t point_count() const { return lattice_.size(); }

  /// 1-based interaction order.
  const MomentMatrix& moment(int order) const { return moments_[order - 1]; }
  const FactorMatrix& factor(int order) const { return factors_[order - 1]; }
  std::span<const FactorMatrix> factors() const { return factors_; }

  WordlengthPattern pattern(const CountingVector& y) const {
    return wlp(y, factors_);
  }

 private:
  ExponentLattice lattice_;
  std::vector<MomentMatrix> moments_;
  std::vector<FactorMatrix> factors_;
};

}  // namespace gma
