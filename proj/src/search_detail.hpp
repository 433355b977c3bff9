#pragma once

// Shared machinery of the two search engines: the lexicographic key being
// minimized and the engine entry points.

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "gma/solver.hpp"

namespace gma::detail {

using Clock = std::chrono::steady_clock;

/// Per-entry tolerance when comparing keys.
inline constexpr double kKeyTol = 1e-9;

/// One entry of a lexicographic key. Without a target the entry is alpha_i;
/// with one it is |alpha_i - target|, the violation of an equality.
struct KeyEntry {
  int order = 1;
  std::optional<double> target;
};

class LexObjective {
 public:
  LexObjective(std::vector<KeyEntry> entries, std::int64_t runs);

  std::size_t size() const { return entries_.size(); }
  const KeyEntry& entry(std::size_t e) const { return entries_[e]; }

  /// Key entry e for the quadratic value q = Y^T H_i Y.
  double value(std::size_t e, double q) const {
    const double alpha = q / runs_squared_;
    const auto& t = entries_[e].target;
    return t ? std::abs(alpha - *t) : alpha;
  }
  /// Lower bound on entry e given a lower bound on Y^T H_i Y.
  double lower_bound(std::size_t e, double q_lower) const {
    const double alpha = q_lower / runs_squared_;
    const auto& t = entries_[e].target;
    return t ? std::max(0.0, alpha - *t) : std::max(0.0, alpha);
  }

  std::vector<double> key(std::span<const double> objectives) const;

  /// True when every equality entry holds within tol.
  bool feasible(std::span<const double> key, double tol) const;

 private:
  std::vector<KeyEntry> entries_;
  double runs_squared_;
};

/// -1, 0 or 1 comparing keys lexicographically with kKeyTol per entry.
int compare_keys(std::span<const double> a, std::span<const double> b);

struct Candidate {
  CountingVector y;
  std::vector<double> objectives;  // Y^T H_i Y, index i - 1
  std::vector<double> key;
};

struct LocalSearchOutcome {
  std::optional<Candidate> best;
  bool out_of_time = false;
  int descents = 0;
};

/// Steepest descent from every warm start, then from config.restarts random
/// compositions. Returns the best key found, earliest start on ties.
LocalSearchOutcome local_search(const GwlpModel& model, const LexObjective& objective,
                                std::int64_t runs, const SolverConfig& config,
                                std::span<const CountingVector> warm_starts,
                                std::uint64_t stream, int restarts,
                                Clock::time_point deadline);

struct BranchAndBoundOutcome {
  std::optional<Candidate> best;
  bool complete = false;
  std::int64_t nodes = 0;
};

/// Depth-first search assigning y_0, y_1, ... in lattice order. The
/// incumbent, if given, only prunes strictly worse subtrees; ties are
/// resolved towards the lexicographically smallest Y found in the tree.
BranchAndBoundOutcome branch_and_bound(const GwlpModel& model,
                                       const LexObjective& objective, std::int64_t runs,
                                       const SolverConfig& config,
                                       const std::optional<Candidate>& incumbent,
                                       Clock::time_point deadline);

/// Uniformly random composition of runs into parts nonnegative parts.
CountingVector random_composition(std::int64_t runs, std::size_t parts,
                                  std::mt19937_64& rng);

/// Mixes a seed with stream identifiers into an independent generator seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

Clock::time_point deadline_after(double seconds);

Candidate evaluate(const GwlpModel& model, const LexObjective& objective,
                   CountingVector y);

/// solve_step() against a deadline shared by all steps of a sequential solve.
StepResult solve_step_until(const GwlpModel& model, std::int64_t runs, int k,
                            std::span<const StepResult> prior, const SolverConfig& config,
                            Clock::time_point deadline);

}  // namespace gma::detail
