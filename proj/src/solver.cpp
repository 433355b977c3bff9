#include "gma/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "search_detail.hpp"

namespace gma {

std::string to_string(SolverMode mode) {
  return mode == SolverMode::exact ? "exact" : "heuristic";
}

std::string to_string(StepStatus status) {
  switch (status) {
    case StepStatus::proven_optimal: return "proven-optimal";
    case StepStatus::best_found: return "best-found";
    case StepStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

SolverMode parse_mode(const std::string& text) {
  if (text == "exact") return SolverMode::exact;
  if (text == "heuristic") return SolverMode::heuristic;
  throw std::invalid_argument("unknown mode '" + text + "' (expected exact or heuristic)");
}

void SolverConfig::validate() const {
  if (!(time_budget > 0.0)) throw std::invalid_argument("time budget must be positive");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (node_cap < 1) throw std::invalid_argument("node cap must be at least 1");
  if (!(zero_tol > 0.0)) throw std::invalid_argument("zero tolerance must be positive");
  if (seed_restarts < 0) throw std::invalid_argument("seed restarts must be nonnegative");
}

QuadraticState::QuadraticState(const GwlpModel& model, CountingVector y)
    : model_(&model), y_(std::move(y)) {
  if (y_.size() != model.point_count()) {
    throw std::invalid_argument("counting vector does not match the model");
  }
  recompute();
}

void QuadraticState::recompute() {
  const auto size = static_cast<Eigen::Index>(y_.size());
  Eigen::VectorXd v(size);
  for (Eigen::Index j = 0; j < size; ++j) v(j) = static_cast<double>(y_[j]);
  gradient_.assign(model_->order_count(), {});
  objectives_.assign(model_->order_count(), 0.0);
  for (int i = 1; i <= model_->order_count(); ++i) {
    const Eigen::VectorXd g = model_->moment(i).entries * v;
    gradient_[i - 1].assign(g.data(), g.data() + size);
    objectives_[i - 1] = v.dot(g);
  }
}

void QuadraticState::move_change(std::size_t p, std::size_t q, std::span<double> out) const {
  for (int i = 1; i <= model_->order_count(); ++i) {
    const auto& h = model_->moment(i).entries;
    const auto& g = gradient_[i - 1];
    const auto ip = static_cast<Eigen::Index>(p);
    const auto iq = static_cast<Eigen::Index>(q);
    out[i - 1] = 2.0 * (g[q] - g[p]) + h(iq, iq) + h(ip, ip) - 2.0 * h(ip, iq);
  }
}

std::vector<double> QuadraticState::delta(std::size_t p, std::size_t q) const {
  std::vector<double> out(objectives_.size());
  move_change(p, q, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += objectives_[i];
  return out;
}

void QuadraticState::apply(std::size_t p, std::size_t q) {
  if (p >= y_.size() || q >= y_.size()) throw std::out_of_range("move outside the lattice");
  if (p == q) return;
  if (y_[p] == 0) throw std::invalid_argument("cannot move a run from an empty point");
  std::vector<double> change(objectives_.size());
  move_change(p, q, change);
  --y_[p];
  ++y_[q];
  for (int i = 1; i <= model_->order_count(); ++i) {
    const auto& h = model_->moment(i).entries;
    auto& g = gradient_[i - 1];
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto ij = static_cast<Eigen::Index>(j);
      g[j] += h(ij, static_cast<Eigen::Index>(q)) - h(ij, static_cast<Eigen::Index>(p));
    }
    objectives_[i - 1] += change[i - 1];
  }
}

namespace detail {

LexObjective::LexObjective(std::vector<KeyEntry> entries, std::int64_t runs)
    : entries_(std::move(entries)),
      runs_squared_(static_cast<double>(runs) * static_cast<double>(runs)) {}

std::vector<double> LexObjective::key(std::span<const double> objectives) const {
  std::vector<double> out(entries_.size());
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    out[e] = value(e, objectives[entries_[e].order - 1]);
  }
  return out;
}

bool LexObjective::feasible(std::span<const double> key, double tol) const {
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    if (entries_[e].target && key[e] > tol) return false;
  }
  return true;
}

int compare_keys(std::span<const double> a, std::span<const double> b) {
  for (std::size_t e = 0; e < a.size(); ++e) {
    if (a[e] < b[e] - kKeyTol) return -1;
    if (a[e] > b[e] + kKeyTol) return 1;
  }
  return 0;
}

CountingVector random_composition(std::int64_t runs, std::size_t parts, std::mt19937_64& rng) {
  // Stars and bars: parts - 1 bars among runs + parts - 1 slots.
  const std::int64_t slots = runs + static_cast<std::int64_t>(parts) - 1;
  std::vector<char> is_bar(static_cast<std::size_t>(slots), 0);
  // Floyd's sampling of parts - 1 distinct slots.
  for (std::int64_t j = slots - static_cast<std::int64_t>(parts) + 1; j < slots; ++j) {
    const auto t = std::uniform_int_distribution<std::int64_t>(0, j)(rng);
    if (is_bar[t]) {
      is_bar[j] = 1;
    } else {
      is_bar[t] = 1;
    }
  }
  CountingVector y(std::vector<std::int64_t>(parts, 0));
  std::size_t part = 0;
  for (std::int64_t s = 0; s < slots; ++s) {
    if (is_bar[s]) {
      ++part;
    } else {
      ++y[part];
    }
  }
  return y;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

Clock::time_point deadline_after(double seconds) {
  const auto span = std::chrono::duration<double>(std::min(seconds, 1e9));
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(span);
}

Candidate evaluate(const GwlpModel& model, const LexObjective& objective, CountingVector y) {
  QuadraticState state(model, std::move(y));
  Candidate c;
  c.objectives.assign(state.objectives().begin(), state.objectives().end());
  c.key = objective.key(c.objectives);
  c.y = state.y();
  return c;
}

}  // namespace detail

namespace {

using detail::KeyEntry;
using detail::LexObjective;

void check_runs(std::int64_t runs) {
  if (runs < 1) throw std::invalid_argument("the number of runs must be at least 1");
}

// Entries 1..m with no targets: the plain wordlength pattern.
LexObjective pattern_objective(const GwlpModel& model, std::int64_t runs) {
  std::vector<KeyEntry> entries;
  for (int i = 1; i <= model.order_count(); ++i) entries.push_back({i, std::nullopt});
  return LexObjective(std::move(entries), runs);
}

// Constraints alpha_j = W_j*/N^2 for j < k, then alpha_k. The heuristic also
// ranks by alpha_{k+1}, ..., alpha_m among equal step objectives.
LexObjective step_objective(const GwlpModel& model, std::int64_t runs, int k,
                            std::span<const StepResult> prior, const SolverConfig& config,
                            bool with_tail) {
  const double runs_sq = static_cast<double>(runs) * static_cast<double>(runs);
  std::vector<KeyEntry> entries;
  for (const auto& step : prior) {
    const double alpha = step.w_star / runs_sq;
    entries.push_back({step.k, alpha <= config.zero_tol ? 0.0 : alpha});
  }
  entries.push_back({k, std::nullopt});
  if (with_tail) {
    for (int i = k + 1; i <= model.order_count(); ++i) entries.push_back({i, std::nullopt});
  }
  return LexObjective(std::move(entries), runs);
}

GmaResult finish(const GwlpModel& model, CountingVector y, std::vector<StepResult> steps,
                 const SolverConfig& config) {
  GmaResult result;
  result.wlp = model.pattern(y);
  result.strength = strength_from_wlp(result.wlp, config.zero_tol);
  result.proven = !steps.empty() && std::all_of(steps.begin(), steps.end(), [](const auto& s) {
    return s.status == StepStatus::proven_optimal;
  });
  result.steps = std::move(steps);
  result.y = std::move(y);
  return result;
}

// Steps reported by the whole-pattern engines: step k's objective is read off
// the final design, which minimizes every step in turn.
std::vector<StepResult> steps_from(const detail::Candidate& c, StepStatus status) {
  std::vector<StepResult> steps;
  for (std::size_t i = 0; i < c.objectives.size(); ++i) {
    steps.push_back({static_cast<int>(i + 1), c.y, std::max(c.objectives[i], 0.0), status});
  }
  return steps;
}

std::optional<detail::Candidate> seed_incumbent(const GwlpModel& model,
                                                const LexObjective& objective,
                                                std::int64_t runs, const SolverConfig& config,
                                                std::span<const CountingVector> warm,
                                                std::uint64_t stream,
                                                detail::Clock::time_point deadline) {
  if (warm.empty() && config.seed_restarts == 0) return std::nullopt;
  return detail::local_search(model, objective, runs, config, warm, stream,
                              config.seed_restarts, deadline)
      .best;
}

}  // namespace

StepResult solve_step(const GwlpModel& model, std::int64_t runs, int k,
                      std::span<const StepResult> prior, const SolverConfig& config) {
  return detail::solve_step_until(model, runs, k, prior, config,
                                  detail::deadline_after(config.time_budget));
}

namespace detail {

StepResult solve_step_until(const GwlpModel& model, std::int64_t runs, int k,
                            std::span<const StepResult> prior, const SolverConfig& config,
                            Clock::time_point deadline) {
  check_runs(runs);
  config.validate();
  if (k < 1 || k > model.order_count()) {
    throw std::invalid_argument("step " + std::to_string(k) + " outside 1.." +
                                std::to_string(model.order_count()));
  }
  if (static_cast<int>(prior.size()) != k - 1) {
    throw std::invalid_argument("step " + std::to_string(k) + " needs the results of " +
                                std::to_string(k - 1) + " earlier steps");
  }
  for (const auto& s : prior) {
    if (s.status == StepStatus::infeasible) {
      throw std::invalid_argument("an earlier step is infeasible");
    }
  }
  std::vector<CountingVector> warm;
  if (!prior.empty()) warm.push_back(prior.back().y_star);
  const bool exact = config.mode == SolverMode::exact;
  const auto objective = step_objective(model, runs, k, prior, config, !exact);
  const auto stream = static_cast<std::uint64_t>(k);

  std::optional<Candidate> best;
  StepStatus status = StepStatus::best_found;
  if (exact) {
    auto incumbent = seed_incumbent(model, objective, runs, config, warm, stream, deadline);
    auto outcome = branch_and_bound(model, objective, runs, config, incumbent, deadline);
    best = std::move(outcome.best);
    if (outcome.complete) status = StepStatus::proven_optimal;
  } else {
    best = local_search(model, objective, runs, config, warm, stream, config.restarts, deadline)
               .best;
  }

  StepResult result;
  result.k = k;
  if (!best || !objective.feasible(best->key, config.zero_tol)) {
    result.status = StepStatus::infeasible;
    return result;
  }
  result.y_star = best->y;
  result.w_star = std::max(best->objectives[k - 1], 0.0);
  result.status = status;
  return result;
}

}  // namespace detail

GmaResult solve_sequential(const FactorSpec& spec, std::int64_t runs,
                           const SolverConfig& config) {
  check_runs(runs);
  config.validate();
  const auto model = GwlpModel::shared(spec);
  const auto deadline = detail::deadline_after(config.time_budget);
  std::vector<StepResult> steps;
  for (int k = 1; k <= model->order_count(); ++k) {
    auto step = detail::solve_step_until(*model, runs, k, steps, config, deadline);
    if (step.status == StepStatus::infeasible) {
      // Only reachable when the budget ran out before any incumbent existed.
      throw std::runtime_error("step " + std::to_string(k) + " found no feasible design");
    }
    steps.push_back(std::move(step));
  }
  CountingVector y = steps.back().y_star;
  return finish(*model, std::move(y), std::move(steps), config);
}

GmaResult exact_lexicographic_bnb(const GwlpModel& model, std::int64_t runs,
                                  const SolverConfig& config) {
  check_runs(runs);
  config.validate();
  const auto deadline = detail::deadline_after(config.time_budget);
  const auto objective = pattern_objective(model, runs);
  auto incumbent = seed_incumbent(model, objective, runs, config, {}, 0, deadline);
  auto outcome = detail::branch_and_bound(model, objective, runs, config, incumbent, deadline);
  if (!outcome.best) throw std::runtime_error("branch-and-bound found no design");
  const auto status = outcome.complete ? StepStatus::proven_optimal : StepStatus::best_found;
  auto steps = steps_from(*outcome.best, status);
  return finish(model, outcome.best->y, std::move(steps), config);
}

GmaResult heuristic_search(const GwlpModel& model, std::int64_t runs,
                           const SolverConfig& config) {
  check_runs(runs);
  config.validate();
  const auto deadline = detail::deadline_after(config.time_budget);
  const auto objective = pattern_objective(model, runs);
  auto outcome =
      detail::local_search(model, objective, runs, config, {}, 0, config.restarts, deadline);
  if (!outcome.best) throw std::runtime_error("local search produced no design");
  auto steps = steps_from(*outcome.best, StepStatus::best_found);
  return finish(model, outcome.best->y, std::move(steps), config);
}

}  // namespace gma
