#pragma once

// Generalized-minimum-aberration search over counting vectors.
//
// Step k minimizes |U_k Y|^2 over nonnegative integer Y with 1^T Y = N while
// holding |U_j Y|^2 = W_j* for every j < k (U_j Y = 0 when W_j* is zero).
// The m steps together minimize the wordlength pattern lexicographically.
// Two engines solve a step: an exact branch-and-bound and a multi-restart
// local search.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gma/factorial.hpp"
#include "gma/gwlp.hpp"

namespace gma {

enum class SolverMode { exact, heuristic };
enum class StepStatus { proven_optimal, best_found, infeasible };

std::string to_string(SolverMode mode);
std::string to_string(StepStatus status);
SolverMode parse_mode(const std::string& text);

struct SolverConfig {
  SolverMode mode = SolverMode::heuristic;
  std::uint64_t seed = 1;
  double time_budget = 600.0;  // seconds, whole solve
  int restarts = 200;
  std::int64_t node_cap = 200'000'000;
  double zero_tol = kZeroTol;
  /// Restarts of the local search used to seed the exact engine's incumbent.
  int seed_restarts = 8;

  /// Throws std::invalid_argument on a non-positive budget, restart count or
  /// node cap.
  void validate() const;
};

struct StepResult {
  int k = 0;
  CountingVector y_star;
  double w_star = 0.0;  // |U_k Y*|^2
  StepStatus status = StepStatus::infeasible;
};

struct GmaResult {
  CountingVector y;
  WordlengthPattern wlp;
  int strength = 0;
  std::vector<StepResult> steps;
  bool proven = false;

  bool is_oa() const { return strength >= 1; }
};

/// Solves step k given the results of steps 1..k-1. Status is
/// proven_optimal only in exact mode when the search tree was exhausted.
StepResult solve_step(const GwlpModel& model, std::int64_t runs, int k,
                      std::span<const StepResult> prior, const SolverConfig& config);

/// Runs solve_step for k = 1..m, threading the optimal objectives through.
GmaResult solve_sequential(const FactorSpec& spec, std::int64_t runs,
                           const SolverConfig& config);

/// Lexicographic branch-and-bound on the whole pattern. Among designs with
/// equal patterns the lexicographically smallest counting vector is returned.
GmaResult exact_lexicographic_bnb(const GwlpModel& model, std::int64_t runs,
                                  const SolverConfig& config);

/// Multi-restart steepest descent on the whole pattern. Deterministic for a
/// fixed config as long as the time budget is not hit.
GmaResult heuristic_search(const GwlpModel& model, std::int64_t runs,
                           const SolverConfig& config);

/// Y^T H_i Y for every order, kept current under unit transfers of mass.
class QuadraticState {
 public:
  QuadraticState(const GwlpModel& model, CountingVector y);

  const CountingVector& y() const { return y_; }
  /// Y^T H_i Y, index i - 1.
  std::span<const double> objectives() const { return objectives_; }
  /// (H_i Y)_p.
  double gradient(int order, std::size_t p) const { return gradient_[order - 1][p]; }

  /// Objectives after moving one run from point p to point q, computed as
  /// old + 2 (H Y)_q - 2 (H Y)_p + H_qq + H_pp - 2 H_pq.
  std::vector<double> delta(std::size_t p, std::size_t q) const;
  /// Per-order change only, written to out[0..m).
  void move_change(std::size_t p, std::size_t q, std::span<double> out) const;

  /// Applies the move. Throws std::invalid_argument if y_p is zero.
  void apply(std::size_t p, std::size_t q);
  /// Recomputes everything from y, discarding accumulated rounding.
  void recompute();

 private:
  const GwlpModel* model_;
  CountingVector y_;
  std::vector<std::vector<double>> gradient_;
  std::vector<double> objectives_;
};

}  // namespace gma
