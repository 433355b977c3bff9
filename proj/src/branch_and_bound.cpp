#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "search_detail.hpp"

namespace gma::detail {
namespace {

// Factor permutations that map equal-level factors onto each other, as
// permutations of lattice indices: the permuted vector is y[perm[i]].
std::vector<std::vector<std::uint32_t>> factor_symmetries(const ExponentLattice& lattice,
                                                          std::size_t limit) {
  const auto& levels = lattice.spec().levels();
  const int m = lattice.width();
  std::vector<int> sigma(m);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<std::vector<int>> group;
  while (std::next_permutation(sigma.begin(), sigma.end())) {
    bool preserves = true;
    for (int k = 0; k < m; ++k) preserves = preserves && levels[sigma[k]] == levels[k];
    if (!preserves) continue;
    group.push_back(sigma);
    if (group.size() > limit) return {};
  }
  std::vector<std::vector<std::uint32_t>> perms;
  std::vector<int> z(m);
  for (const auto& s : group) {
    std::vector<std::uint32_t> perm(lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      const auto row = lattice.row(i);
      for (int k = 0; k < m; ++k) z[k] = row[s[k]];
      perm[i] = static_cast<std::uint32_t>(lattice.index_of(z));
    }
    perms.push_back(std::move(perm));
  }
  return perms;
}

// Euclidean projection onto {x >= 0, sum x = total}.
void project_to_simplex(std::vector<double>& x, double total) {
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - total) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) shift = candidate;
  }
  for (double& v : x) v = std::max(v - shift, 0.0);
}

// True when every entry of every H_i is a multiple of 1/2, so that every
// Y^T H_i Y over integer Y is a multiple of 1/2 as well.
bool half_integral(const GwlpModel& model) {
  for (int i = 1; i <= model.order_count(); ++i) {
    const auto& h = model.moment(i).entries;
    for (Eigen::Index j = 0; j < h.size(); ++j) {
      const double twice = 2.0 * h.data()[j];
      if (twice != std::round(twice)) return false;
    }
  }
  return true;
}

class Tree {
 public:
  Tree(const GwlpModel& model, const LexObjective& objective, std::int64_t runs,
       const SolverConfig& config, const std::optional<Candidate>& incumbent,
       Clock::time_point deadline)
      : model_(model), objective_(objective), runs_(runs), config_(config),
        deadline_(deadline), size_(model.point_count()), orders_(model.order_count()),
        y_(size_, 0), gradient_(orders_, std::vector<double>(size_, 0.0)),
        quad_(orders_, 0.0), best_(incumbent),
        symmetries_(factor_symmetries(model.lattice(), 720)),
        half_integral_(half_integral(model)) {
    for (int i = 1; i <= orders_; ++i) {
      h_.push_back(model.moment(i).entries.data());
      step_.push_back(0.5 / std::max(model.factor(i).largest_eigenvalue, 1e-12));
    }
  }

  BranchAndBoundOutcome run() {
    descend(0, runs_);
    BranchAndBoundOutcome out;
    out.complete = !aborted_;
    out.nodes = nodes_;
    if (best_) out.best = evaluate(model_, objective_, best_->y);
    return out;
  }

 private:
  double h(int i, std::size_t p, std::size_t q) const { return h_[i][q * size_ + p]; }

  void assign(std::size_t p, std::int64_t v) {
    if (v == 0) return;
    const double dv = static_cast<double>(v);
    y_[p] = v;
    for (int i = 0; i < orders_; ++i) {
      quad_[i] += 2.0 * dv * gradient_[i][p] + dv * dv * h(i, p, p);
      const double* col = h_[i] + p * size_;
      auto& g = gradient_[i];
      for (std::size_t j = 0; j < size_; ++j) g[j] += dv * col[j];
    }
  }

  void unassign(std::size_t p, std::int64_t v, const std::vector<double>& saved_quad) {
    if (v == 0) return;
    const double dv = static_cast<double>(v);
    y_[p] = 0;
    for (int i = 0; i < orders_; ++i) {
      const double* col = h_[i] + p * size_;
      auto& g = gradient_[i];
      for (std::size_t j = 0; j < size_; ++j) g[j] -= dv * col[j];
    }
    quad_ = saved_quad;
  }

  bool budget_exhausted() {
    if (aborted_) return true;
    if (++nodes_ > config_.node_cap) aborted_ = true;
    if ((nodes_ & 1023) == 0 && Clock::now() > deadline_) aborted_ = true;
    return aborted_;
  }

  // Positions [0, assigned) of y are final.
  void descend(std::size_t assigned, std::int64_t remaining) {
    if (remaining == 0) {
      leaf();
      return;
    }
    if (assigned + 1 == size_) {
      const auto saved = quad_;
      assign(assigned, remaining);
      leaf();
      unassign(assigned, remaining, saved);
      return;
    }
    for (std::int64_t v = 0; v <= remaining; ++v) {
      if (budget_exhausted()) return;
      const auto saved = quad_;
      assign(assigned, v);
      if (prefix_canonical(assigned + 1) && !prunable(assigned + 1, remaining - v)) {
        descend(assigned + 1, remaining - v);
      }
      unassign(assigned, v, saved);
    }
  }

  void leaf() {
    if (!canonical()) return;
    const auto key = objective_.key(quad_);
    if (best_) {
      const int c = compare_keys(key, best_->key);
      if (c > 0 || (c == 0 && best_from_tree_)) return;
    }
    Candidate found;
    found.y = CountingVector(y_);
    found.objectives = quad_;
    found.key = key;
    best_ = std::move(found);
    best_from_tree_ = true;
  }

  // False when some symmetry already maps the assigned prefix to a
  // lexicographically smaller vector.
  bool prefix_canonical(std::size_t assigned) const {
    for (const auto& perm : symmetries_) {
      for (std::size_t j = 0; j < assigned; ++j) {
        const std::size_t src = perm[j];
        if (src >= assigned) break;
        if (y_[src] != y_[j]) {
          if (y_[src] < y_[j]) return false;
          break;
        }
      }
    }
    return true;
  }

  bool canonical() const { return prefix_canonical(size_); }

  bool prunable(std::size_t assigned, std::int64_t remaining) {
    if (!best_) return false;
    const double runs_sq = static_cast<double>(runs_) * static_cast<double>(runs_);
    for (std::size_t e = 0; e < objective_.size(); ++e) {
      const KeyEntry& entry = objective_.entry(e);
      const double incumbent = best_->key[e];
      // Stop early once the bound decides the comparison either way.
      const double prune_above = entry.target
                                     ? (*entry.target + incumbent + kKeyTol) * runs_sq
                                     : (incumbent + kKeyTol) * runs_sq;
      const double explore_below = entry.target
                                       ? -std::numeric_limits<double>::infinity()
                                       : (incumbent - kKeyTol) * runs_sq;
      const double lb = objective_.lower_bound(
          e, lower_bound(entry.order - 1, assigned, remaining, prune_above, explore_below));
      if (lb > incumbent + kKeyTol) return true;
      if (lb < incumbent - kKeyTol) return false;
    }
    return best_from_tree_;
  }

  // Certified lower bound on Y^T H_i Y over real completions: positions
  // [start, size) nonnegative and summing to remaining. Projected gradient
  // with step 1 / (2 lambda_max), bounded through the Frank-Wolfe gap.
  double lower_bound(int i, std::size_t start, std::int64_t remaining, double prune_above,
                     double explore_below) {
    const double base = quad_[i];
    const auto& g = gradient_[i];
    const std::size_t free = size_ - start;
    const double total = static_cast<double>(remaining);
    if (remaining == 0) return base;
    if (free == 1) {
      return base + 2.0 * total * g[start] + total * total * h(i, start, start);
    }
    x_.assign(free, total / static_cast<double>(free));
    hx_.assign(free, 0.0);
    grad_.assign(free, 0.0);
    double best = 0.0;
    for (int iteration = 0; iteration < 400; ++iteration) {
      std::fill(hx_.begin(), hx_.end(), 0.0);
      for (std::size_t b = 0; b < free; ++b) {
        const double xb = x_[b];
        if (xb == 0.0) continue;
        const double* col = h_[i] + (start + b) * size_ + start;
        for (std::size_t a = 0; a < free; ++a) hx_[a] += col[a] * xb;
      }
      double value = base;
      double dot = 0.0;
      double min_grad = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < free; ++a) {
        value += 2.0 * g[start + a] * x_[a] + x_[a] * hx_[a];
        grad_[a] = 2.0 * g[start + a] + 2.0 * hx_[a];
        dot += grad_[a] * x_[a];
        min_grad = std::min(min_grad, grad_[a]);
      }
      const double gap = dot - total * min_grad;
      best = std::max(best, value - gap);
      if (best > prune_above || value < explore_below) break;
      if (gap <= 1e-6 * std::max(1.0, std::abs(value))) break;
      for (std::size_t a = 0; a < free; ++a) x_[a] -= step_[i] * grad_[a];
      project_to_simplex(x_, total);
    }
    if (half_integral_) best = std::ceil(2.0 * best - 1e-6) / 2.0;
    return std::max(best, 0.0);
  }

  const GwlpModel& model_;
  const LexObjective& objective_;
  std::int64_t runs_;
  const SolverConfig& config_;
  Clock::time_point deadline_;
  std::size_t size_;
  int orders_;
  std::vector<std::int64_t> y_;
  std::vector<std::vector<double>> gradient_;  // H_i y over assigned positions
  std::vector<double> quad_;                   // y^T H_i y over assigned positions
  std::vector<const double*> h_;
  std::vector<double> step_;
  std::optional<Candidate> best_;
  bool best_from_tree_ = false;
  std::vector<std::vector<std::uint32_t>> symmetries_;
  bool half_integral_;
  std::int64_t nodes_ = 0;
  bool aborted_ = false;
  std::vector<double> x_, hx_, grad_;
};

}  // namespace

BranchAndBoundOutcome branch_and_bound(const GwlpModel& model, const LexObjective& objective,
                                       std::int64_t runs, const SolverConfig& config,
                                       const std::optional<Candidate>& incumbent,
                                       Clock::time_point deadline) {
  Tree tree(model, objective, runs, config, incumbent, deadline);
  return tree.run();
}

}  // namespace gma::detail
