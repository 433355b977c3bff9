#include "gma/gwlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace gma {
namespace {

// cos(2 pi k / n) and sin(2 pi k / n) for k in [0, n). Rational values are
// stored exactly, and cos is mirrored so that cos(k) and cos(n - k) are
// bit-identical.
struct UnitCircle {
  std::vector<double> cos;
  std::vector<double> sin;

  explicit UnitCircle(int n) : cos(n), sin(n) {
    for (int k = 0; k < n; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / n;
      cos[k] = exact_or(k, n, std::cos(angle), true);
      sin[k] = exact_or(k, n, std::sin(angle), false);
    }
    for (int k = 1; k < n; ++k) {
      if (n - k < k) {
        cos[k] = cos[n - k];
        sin[k] = -sin[n - k];
      }
    }
  }

  // Rational values at multiples of a twelfth of a turn; NaN marks the
  // irrational ones, which keep the libm result.
  static double exact_or(int k, int n, double fallback, bool cosine) {
    if ((12LL * k) % n != 0) return fallback;
    constexpr double kIrr = std::numeric_limits<double>::quiet_NaN();
    static constexpr double kCos[12] = {1, kIrr, 0.5, 0, -0.5, kIrr, -1, kIrr, -0.5, 0, 0.5, kIrr};
    static constexpr double kSin[12] = {0, 0.5, kIrr, 1, kIrr, 0.5, 0, -0.5, kIrr, -1, kIrr, -0.5};
    const double v = (cosine ? kCos : kSin)[12LL * k / n];
    return std::isnan(v) ? fallback : v;
  }
};

// Phase multiplier n / n_k for each factor.
std::vector<int> phase_weights(const FactorSpec& spec) {
  std::vector<int> w(spec.factor_count());
  for (int k = 0; k < spec.factor_count(); ++k) w[k] = spec.lcm() / spec.levels_of(k);
  return w;
}

int reduced_phase(std::span<const int> alpha, std::span<const int> z,
                  std::span<const int> weights, int n) {
  long long s = 0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    s += static_cast<long long>(weights[k]) * alpha[k] * z[k];
  }
  s %= n;
  return static_cast<int>(s < 0 ? s + n : s);
}

// table[i][d] = sum over weight-i multi-indices a of cos(phase(a, d)), where
// d runs over lattice rows read as differences t - z. Row 0 of the result is
// unused (i = 0 is the constant term).
std::vector<std::vector<double>> difference_table(const ExponentLattice& lattice) {
  const FactorSpec& spec = lattice.spec();
  const int n = spec.lcm();
  const UnitCircle circle(n);
  const auto weights = phase_weights(spec);
  const std::size_t size = lattice.size();
  std::vector<std::vector<double>> table(
      spec.factor_count() + 1, std::vector<double>(size, 0.0));
  for (std::size_t d = 0; d < size; ++d) {
    const auto diff = lattice.row(d);
    for (std::size_t a = 1; a < size; ++a) {
      const auto alpha = lattice.row(a);
      table[weight(alpha)][d] += circle.cos[reduced_phase(alpha, diff, weights, n)];
    }
  }
  return table;
}

// Lattice index of (t - z) mod n_k for every ordered pair of rows.
std::vector<std::uint32_t> difference_index(const ExponentLattice& lattice) {
  const FactorSpec& spec = lattice.spec();
  const std::size_t size = lattice.size();
  const int m = spec.factor_count();
  std::vector<std::size_t> stride(m, 1);
  for (int k = m - 2; k >= 0; --k) stride[k] = stride[k + 1] * spec.levels_of(k + 1);
  std::vector<std::uint32_t> index(size * size);
  for (std::size_t p = 0; p < size; ++p) {
    const auto z = lattice.row(p);
    for (std::size_t q = 0; q < size; ++q) {
      const auto t = lattice.row(q);
      std::size_t d = 0;
      for (int k = 0; k < m; ++k) {
        const int nk = spec.levels_of(k);
        d += static_cast<std::size_t>(((t[k] - z[k]) % nk + nk) % nk) * stride[k];
      }
      index[p * size + q] = static_cast<std::uint32_t>(d);
    }
  }
  return index;
}

// K_i = sum over i-subsets of factors of prod (n_k - 1).
std::int64_t weight_count(const FactorSpec& spec, int order) {
  std::vector<std::int64_t> poly(spec.factor_count() + 1, 0);
  poly[0] = 1;
  for (int k = 0; k < spec.factor_count(); ++k) {
    for (int i = k + 1; i >= 1; --i) poly[i] += poly[i - 1] * (spec.levels_of(k) - 1);
  }
  return poly[order];
}

MomentMatrix assemble(const std::vector<double>& row_table,
                      const std::vector<std::uint32_t>& diff, std::size_t size,
                      int order, std::int64_t count) {
  MomentMatrix h;
  h.order = order;
  h.weight_count = count;
  h.entries.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t p = 0; p < size; ++p) {
    for (std::size_t q = 0; q < size; ++q) {
      h.entries(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
          row_table[diff[p * size + q]];
    }
  }
  return h;
}

Eigen::VectorXd as_real(const CountingVector& y) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = static_cast<double>(y[i]);
  }
  return v;
}

}  // namespace

Coefficient coefficient(const CountingVector& y, const ExponentLattice& lattice,
                        std::span<const int> alpha) {
  const FactorSpec& spec = lattice.spec();
  const int n = spec.lcm();
  const UnitCircle circle(n);
  const auto weights = phase_weights(spec);
  // Accumulate integer multiplicities per phase, then evaluate once each.
  std::vector<std::int64_t> per_phase(n, 0);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (y[i] == 0) continue;
    per_phase[reduced_phase(alpha, lattice.row(i), weights, n)] += y[i];
  }
  double re = 0.0;
  double im = 0.0;
  for (int s = 0; s < n; ++s) {
    if (per_phase[s] == 0) continue;
    re += static_cast<double>(per_phase[s]) * circle.cos[s];
    im -= static_cast<double>(per_phase[s]) * circle.sin[s];
  }
  const double points = static_cast<double>(lattice.size());
  return {re / points, im / points};
}

double h_entry(const FactorSpec& spec, std::span<const int> alpha,
               std::span<const int> z, std::span<const int> t) {
  const int n = spec.lcm();
  long long s = 0;
  for (int k = 0; k < spec.factor_count(); ++k) {
    s += static_cast<long long>(n / spec.levels_of(k)) * alpha[k] * (t[k] - z[k]);
  }
  s %= n;
  if (s < 0) s += n;
  return UnitCircle(n).cos[static_cast<std::size_t>(s)];
}

MomentMatrix build_moment_matrix(const ExponentLattice& lattice, int order) {
  if (order < 1 || order > lattice.width()) {
    throw std::invalid_argument("interaction order " + std::to_string(order) +
                                " outside 1.." + std::to_string(lattice.width()));
  }
  const auto table = difference_table(lattice);
  return assemble(table[order], difference_index(lattice), lattice.size(), order,
                  weight_count(lattice.spec(), order));
}

std::vector<MomentMatrix> build_moment_matrices(const ExponentLattice& lattice) {
  const auto table = difference_table(lattice);
  const auto diff = difference_index(lattice);
  std::vector<MomentMatrix> out;
  for (int i = 1; i <= lattice.width(); ++i) {
    out.push_back(assemble(table[i], diff, lattice.size(), i,
                           weight_count(lattice.spec(), i)));
  }
  return out;
}

FactorMatrix factorize(const MomentMatrix& h) {
  const double scale = static_cast<double>(std::max<std::int64_t>(h.weight_count, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.entries);
  if (eig.info() != Eigen::Success) {
    throw FactorizationError("eigendecomposition of H_" + std::to_string(h.order) +
                             " did not converge");
  }
  const Eigen::VectorXd& values = eig.eigenvalues();
  const Eigen::MatrixXd& vectors = eig.eigenvectors();
  const double cutoff = 1e-9 * scale;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = values.size() - 1; j >= 0; --j) {
    if (values(j) > cutoff) kept.push_back(j);
  }
  FactorMatrix f;
  f.order = h.order;
  f.largest_eigenvalue = values.size() ? std::max(values(values.size() - 1), 0.0) : 0.0;
  f.u.resize(static_cast<Eigen::Index>(kept.size()), h.entries.cols());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    f.u.row(static_cast<Eigen::Index>(r)) =
        std::sqrt(values(kept[r])) * vectors.col(kept[r]).transpose();
  }
  const double residual = (f.u.transpose() * f.u - h.entries).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * scale) {
    throw FactorizationError("factor of H_" + std::to_string(h.order) +
                             " reconstructs with residual " + std::to_string(residual));
  }
  return f;
}

double WordlengthPattern::total() const {
  double s = 0.0;
  for (double a : alpha) s += a;
  return s;
}

WordlengthPattern wlp(const CountingVector& y, std::span<const FactorMatrix> factors) {
  const double n = static_cast<double>(y.runs());
  if (n <= 0) throw std::invalid_argument("a fraction needs at least one run");
  const Eigen::VectorXd v = as_real(y);
  WordlengthPattern w;
  for (const auto& f : factors) {
    if (f.u.cols() != v.size()) {
      throw std::invalid_argument("counting vector does not match the factor matrices");
    }
    const double value = (f.u * v).squaredNorm() / (n * n);
    w.alpha.push_back(value < 0.0 ? 0.0 : value);
  }
  return w;
}

WordlengthPattern wlp_oracle(const CountingVector& y, const ExponentLattice& lattice) {
  validate_counting_vector(y, lattice);
  const double c0 = static_cast<double>(y.runs()) / static_cast<double>(lattice.size());
  WordlengthPattern w;
  w.alpha.assign(lattice.width(), 0.0);
  for (std::size_t a = 1; a < lattice.size(); ++a) {
    const auto alpha = lattice.row(a);
    w.alpha[weight(alpha) - 1] += std::norm(coefficient(y, lattice, alpha));
  }
  for (double& v : w.alpha) v /= c0 * c0;
  return w;
}

int strength_from_wlp(const WordlengthPattern& w, double tol) {
  int t = 0;
  while (t < static_cast<int>(w.size()) && w[t] <= tol) ++t;
  return t;
}

double parseval_total(const CountingVector& y, std::size_t point_count) {
  const double n = static_cast<double>(y.runs());
  return static_cast<double>(point_count) * static_cast<double>(y.sum_of_squares()) / (n * n) - 1.0;
}

GwlpModel::GwlpModel(const FactorSpec& spec, std::size_t max_points)
    : lattice_(spec, max_points), moments_(build_moment_matrices(lattice_)) {
  factors_.reserve(moments_.size());
  for (const auto& h : moments_) factors_.push_back(factorize(h));
}

std::shared_ptr<const GwlpModel> GwlpModel::shared(const FactorSpec& spec,
                                                   std::size_t max_points) {
  static std::mutex mutex;
  static std::map<std::vector<int>, std::shared_ptr<const GwlpModel>> cache;
  if (spec.point_count() > max_points) {
    throw InstanceTooLarge("full factorial " + spec.to_string() + " has " +
                           std::to_string(spec.point_count()) +
                           " points; the cap is " + std::to_string(max_points));
  }
  std::lock_guard lock(mutex);
  auto& slot = cache[spec.levels()];
  if (!slot) slot = std::make_shared<const GwlpModel>(spec, max_points);
  return slot;
}

}  // namespace gma
