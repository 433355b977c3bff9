#include "gma/verify.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gma/gwlp.hpp"

namespace gma {

std::vector<std::vector<int>> factor_subsets(int m, int t) {
  std::vector<std::vector<int>> out;
  if (t < 0 || t > m) return out;
  std::vector<int> subset(t);
  for (int i = 0; i < t; ++i) subset[i] = i;
  while (true) {
    out.push_back(subset);
    int i = t - 1;
    while (i >= 0 && subset[i] == m - t + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < t; ++j) subset[j] = subset[j - 1] + 1;
  }
  return out;
}

ProjectionReport project(const DesignMatrix& design, const FactorSpec& spec,
                         std::span<const int> factors) {
  if (factors.empty()) throw std::invalid_argument("projection needs at least one factor");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i] < 0 || factors[i] >= spec.factor_count() ||
        (i > 0 && factors[i] <= factors[i - 1])) {
      throw std::invalid_argument("projection factors must be increasing and within 1.." +
                                  std::to_string(spec.factor_count()));
    }
  }
  ProjectionReport report;
  report.factors.assign(factors.begin(), factors.end());

  std::vector<int> levels;
  for (int f : factors) levels.push_back(spec.levels_of(f));
  std::vector<int> combo(factors.size(), 0);
  std::int64_t cells = 0;
  while (true) {
    report.counts.emplace(combo, 0);
    ++cells;
    int k = static_cast<int>(combo.size()) - 1;
    while (k >= 0 && ++combo[k] == levels[k]) combo[k--] = 0;
    if (k < 0) break;
  }

  std::vector<int> key(factors.size());
  for (const auto& run : design.runs) {
    for (std::size_t i = 0; i < factors.size(); ++i) key[i] = run[factors[i]];
    auto it = report.counts.find(key);
    if (it == report.counts.end()) {
      throw std::out_of_range("run has a level outside its factor's range");
    }
    ++it->second;
  }

  const auto n = static_cast<std::int64_t>(design.run_count());
  const std::int64_t first = report.counts.begin()->second;
  bool equal = first > 0;
  for (const auto& [_, c] : report.counts) equal = equal && c == first;
  report.uniform = equal && first * cells == n;
  if (report.uniform) report.replicate = first;
  return report;
}

std::optional<ProjectionReport> first_failing_projection(const DesignMatrix& design,
                                                         const FactorSpec& spec, int t) {
  for (const auto& subset : factor_subsets(spec.factor_count(), t)) {
    auto report = project(design, spec, subset);
    if (!report.uniform) return report;
  }
  return std::nullopt;
}

bool is_oa_of_strength(const DesignMatrix& design, const FactorSpec& spec, int t) {
  if (t < 1 || t > spec.factor_count()) {
    throw std::invalid_argument("strength " + std::to_string(t) + " outside 1.." +
                                std::to_string(spec.factor_count()));
  }
  const auto n = static_cast<std::int64_t>(design.run_count());
  for (const auto& subset : factor_subsets(spec.factor_count(), t)) {
    std::int64_t cells = 1;
    for (int f : subset) cells *= spec.levels_of(f);
    if (n == 0 || n % cells != 0) return false;
  }
  if (first_failing_projection(design, spec, t)) return false;
  // Strength t implies strength s for every s < t.
  for (int s = 1; s < t; ++s) {
    if (first_failing_projection(design, spec, s)) {
      throw std::logic_error("design projects uniformly on " + std::to_string(t) +
                             " factors but not on " + std::to_string(s));
    }
  }
  return true;
}

int projection_strength(const DesignMatrix& design, const FactorSpec& spec) {
  int t = 0;
  while (t < spec.factor_count() && !first_failing_projection(design, spec, t + 1)) ++t;
  return t;
}

int strength_by_coefficients(const CountingVector& y, const ExponentLattice& lattice,
                             double tol) {
  std::vector<double> worst(lattice.width() + 1, 0.0);
  for (std::size_t a = 1; a < lattice.size(); ++a) {
    const auto alpha = lattice.row(a);
    const int w = weight(alpha);
    worst[w] = std::max(worst[w], std::abs(coefficient(y, lattice, alpha)));
  }
  int t = 0;
  while (t < lattice.width() && worst[t + 1] <= tol) ++t;
  return t;
}

}  // namespace gma
