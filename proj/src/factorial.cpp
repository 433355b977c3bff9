#include "gma/factorial.hpp"

#include <limits>
#include <numeric>
#include <sstream>

namespace gma {

FactorSpec::FactorSpec(std::vector<int> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) {
    throw std::invalid_argument("at least one factor is required");
  }
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    if (levels_[j] < 2) {
      throw std::invalid_argument("factor " + std::to_string(j + 1) +
                                  " has " + std::to_string(levels_[j]) +
                                  " levels; at least 2 are required");
    }
  }
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  for (int n : levels_) {
    const auto un = static_cast<std::size_t>(n);
    point_count_ = point_count_ > kMax / un ? kMax : point_count_ * un;
    const long long next = std::lcm(static_cast<long long>(lcm_),
                                    static_cast<long long>(n));
    if (next > std::numeric_limits<int>::max()) {
      throw InstanceTooLarge("lcm of the level counts overflows");
    }
    lcm_ = static_cast<int>(next);
  }
}

std::string FactorSpec::to_string() const {
  std::ostringstream out;
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    if (j) out << ',';
    out << levels_[j];
  }
  return out.str();
}

FactorSpec parse_levels(const std::string& text) {
  std::vector<int> levels;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t\r");
    if (first == std::string::npos) {
      throw std::invalid_argument("empty entry in level list '" + text + "'");
    }
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw std::invalid_argument("level count '" + item +
                                  "' is not an integer");
    }
    levels.push_back(value);
  }
  return FactorSpec(std::move(levels));
}

ExponentLattice::ExponentLattice(FactorSpec spec, std::size_t max_points)
    : spec_(std::move(spec)), size_(spec_.point_count()) {
  if (size_ > max_points) {
    throw InstanceTooLarge("full factorial " + spec_.to_string() + " has " +
                           std::to_string(size_) + " points; the cap is " +
                           std::to_string(max_points));
  }
  const int m = width();
  coords_.assign(size_ * static_cast<std::size_t>(m), 0);
  std::vector<int> z(m, 0);
  for (std::size_t i = 0; i < size_; ++i) {
    std::copy(z.begin(), z.end(), coords_.begin() + i * m);
    for (int k = m - 1; k >= 0; --k) {
      if (++z[k] < spec_.levels_of(k)) break;
      z[k] = 0;
    }
  }
}

std::size_t ExponentLattice::index_of(std::span<const int> z) const {
  if (static_cast<int>(z.size()) != width()) {
    throw std::out_of_range("level tuple has " + std::to_string(z.size()) +
                            " entries, expected " + std::to_string(width()));
  }
  std::size_t index = 0;
  for (int k = 0; k < width(); ++k) {
    const int n = spec_.levels_of(k);
    if (z[k] < 0 || z[k] >= n) {
      throw std::out_of_range("level " + std::to_string(z[k]) +
                              " out of range for factor " +
                              std::to_string(k + 1) + " with " +
                              std::to_string(n) + " levels");
    }
    index = index * static_cast<std::size_t>(n) + static_cast<std::size_t>(z[k]);
  }
  return index;
}

ExponentLattice enumerate_lattice(const FactorSpec& spec,
                                  std::size_t max_points) {
  return ExponentLattice(spec, max_points);
}

int weight(std::span<const int> alpha) {
  int w = 0;
  for (int a : alpha) w += a != 0;
  return w;
}

std::int64_t CountingVector::runs() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t CountingVector::sum_of_squares() const {
  std::int64_t s = 0;
  for (auto c : counts) s += c * c;
  return s;
}

void validate_counting_vector(const CountingVector& y,
                              const ExponentLattice& lattice) {
  if (y.size() != lattice.size()) {
    throw std::invalid_argument("counting vector has " +
                                std::to_string(y.size()) + " entries, expected " +
                                std::to_string(lattice.size()));
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0) {
      throw std::invalid_argument("counting vector entry " + std::to_string(i) +
                                  " is negative");
    }
  }
  if (y.runs() < 1) {
    throw std::invalid_argument("a fraction needs at least one run");
  }
}

DesignMatrix expand(const CountingVector& y, const ExponentLattice& lattice) {
  if (y.size() != lattice.size()) {
    throw std::invalid_argument("counting vector does not match the lattice");
  }
  DesignMatrix design;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto row = lattice.row(i);
    for (std::int64_t r = 0; r < y[i]; ++r) {
      design.runs.emplace_back(row.begin(), row.end());
    }
  }
  return design;
}

CountingVector compress(const DesignMatrix& design,
                        const ExponentLattice& lattice) {
  CountingVector y(std::vector<std::int64_t>(lattice.size(), 0));
  for (std::size_t r = 0; r < design.runs.size(); ++r) {
    try {
      ++y[lattice.index_of(design.runs[r])];
    } catch (const std::out_of_range& e) {
      throw std::out_of_range("run " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  return y;
}

CountingVector full_factorial(const ExponentLattice& lattice) {
  return CountingVector(std::vector<std::int64_t>(lattice.size(), 1));
}

}  // namespace gma
