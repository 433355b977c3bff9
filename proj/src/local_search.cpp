#include <algorithm>

#include "search_detail.hpp"

namespace gma::detail {
namespace {

struct Move {
  std::size_t from;
  std::size_t to;
};

// Raw column-major views of H_1..H_m; H is symmetric so H(p, q) = col_q[p].
struct MomentViews {
  std::vector<const double*> data;
  std::size_t size;

  explicit MomentViews(const GwlpModel& model) : size(model.point_count()) {
    for (int i = 1; i <= model.order_count(); ++i) {
      data.push_back(model.moment(i).entries.data());
    }
  }
  double at(int order, std::size_t p, std::size_t q) const {
    return data[order - 1][q * size + p];
  }
};

class Descent {
 public:
  Descent(const GwlpModel& model, const LexObjective& objective, std::mt19937_64& rng)
      : model_(model), views_(model), objective_(objective), rng_(rng),
        orders_(model.order_count()) {}

  // Runs to a local minimum over single and paired unit transfers. Returns
  // false if the deadline interrupted it.
  bool run(QuadraticState& state, Clock::time_point deadline) {
    auto current = objective_.key(state.objectives());
    while (true) {
      if (Clock::now() > deadline) return false;
      if (improve_single(state, current)) continue;
      if (improve_pair(state, current)) continue;
      return true;
    }
  }

 private:
  // Key of the objectives shifted by change, written to out.
  void shifted_key(const QuadraticState& state, std::span<const double> change,
                   std::vector<double>& out) const {
    const auto base = state.objectives();
    for (std::size_t e = 0; e < objective_.size(); ++e) {
      const int i = objective_.entry(e).order;
      out[e] = objective_.value(e, base[i - 1] + change[i - 1]);
    }
  }

  // Tracks the best strictly improving key; equal-best keys are sampled
  // uniformly so the seed controls which one wins.
  template <typename Payload>
  struct Selection {
    std::vector<double> key;
    Payload payload{};
    std::uint64_t ties = 0;

    void offer(const std::vector<double>& candidate, const std::vector<double>& current,
               const Payload& p, std::mt19937_64& rng) {
      if (compare_keys(candidate, current) >= 0) return;
      if (ties == 0) {
        key = candidate;
        payload = p;
        ties = 1;
        return;
      }
      const int c = compare_keys(candidate, key);
      if (c < 0) {
        key = candidate;
        payload = p;
        ties = 1;
      } else if (c == 0) {
        ++ties;
        if (std::uniform_int_distribution<std::uint64_t>(0, ties - 1)(rng) == 0) payload = p;
      }
    }
  };

  std::vector<Move> legal_moves(const QuadraticState& state) const {
    std::vector<Move> moves;
    const auto& y = state.y();
    for (std::size_t p = 0; p < y.size(); ++p) {
      if (y[p] == 0) continue;
      for (std::size_t q = 0; q < y.size(); ++q) {
        if (q != p) moves.push_back({p, q});
      }
    }
    return moves;
  }

  bool improve_single(QuadraticState& state, std::vector<double>& current) {
    const auto moves = legal_moves(state);
    changes_.assign(moves.size() * orders_, 0.0);
    Selection<Move> pick;
    std::vector<double> key(objective_.size());
    for (std::size_t a = 0; a < moves.size(); ++a) {
      std::span<double> change(changes_.data() + a * orders_, orders_);
      state.move_change(moves[a].from, moves[a].to, change);
      shifted_key(state, change, key);
      pick.offer(key, current, moves[a], rng_);
    }
    moves_ = moves;
    if (pick.ties == 0) return false;
    state.apply(pick.payload.from, pick.payload.to);
    current = objective_.key(state.objectives());
    return true;
  }

  // Two simultaneous transfers. Reuses the single-move changes computed by
  // the preceding improve_single() call on the same state.
  bool improve_pair(QuadraticState& state, std::vector<double>& current) {
    const auto& y = state.y();
    const auto& moves = moves_;
    Selection<std::pair<std::size_t, std::size_t>> pick;
    std::vector<double> change(orders_);
    std::vector<double> key(objective_.size());
    for (std::size_t a = 0; a < moves.size(); ++a) {
      const Move ma = moves[a];
      const double* ca = changes_.data() + a * orders_;
      for (std::size_t b = a + 1; b < moves.size(); ++b) {
        const Move mb = moves[b];
        if (ma.from == mb.from && y[ma.from] < 2) continue;
        if (ma.from == mb.to && ma.to == mb.from) continue;
        const double* cb = changes_.data() + b * orders_;
        for (int i = 1; i <= orders_; ++i) {
          const double cross = views_.at(i, ma.to, mb.to) - views_.at(i, ma.to, mb.from) -
                               views_.at(i, ma.from, mb.to) + views_.at(i, ma.from, mb.from);
          change[i - 1] = ca[i - 1] + cb[i - 1] + 2.0 * cross;
        }
        shifted_key(state, change, key);
        pick.offer(key, current, {a, b}, rng_);
      }
    }
    if (pick.ties == 0) return false;
    const Move first = moves[pick.payload.first];
    const Move second = moves[pick.payload.second];
    state.apply(first.from, first.to);
    state.apply(second.from, second.to);
    current = objective_.key(state.objectives());
    return true;
  }

  const GwlpModel& model_;
  MomentViews views_;
  const LexObjective& objective_;
  std::mt19937_64& rng_;
  int orders_;
  std::vector<Move> moves_;
  std::vector<double> changes_;
};

}  // namespace

LocalSearchOutcome local_search(const GwlpModel& model, const LexObjective& objective,
                                std::int64_t runs, const SolverConfig& config,
                                std::span<const CountingVector> warm_starts,
                                std::uint64_t stream, int restarts,
                                Clock::time_point deadline) {
  LocalSearchOutcome outcome;
  const std::size_t starts = warm_starts.size() + static_cast<std::size_t>(restarts);
  auto keep = [&](Candidate found) {
    if (!outcome.best || compare_keys(found.key, outcome.best->key) < 0) {
      outcome.best = std::move(found);
    }
  };
  // Warm starts count as incumbents even when no time is left to improve them.
  for (const auto& warm : warm_starts) keep(evaluate(model, objective, warm));
  for (std::size_t s = 0; s < starts; ++s) {
    if (Clock::now() > deadline) {
      outcome.out_of_time = true;
      break;
    }
    std::mt19937_64 rng(derive_seed(config.seed, stream, s));
    CountingVector start = s < warm_starts.size()
                               ? warm_starts[s]
                               : random_composition(runs, model.point_count(), rng);
    QuadraticState state(model, std::move(start));
    Descent descent(model, objective, rng);
    const bool finished = descent.run(state, deadline);
    ++outcome.descents;
    keep(evaluate(model, objective, state.y()));
    if (!finished) {
      outcome.out_of_time = true;
      break;
    }
  }
  return outcome;
}

}  // namespace gma::detail
