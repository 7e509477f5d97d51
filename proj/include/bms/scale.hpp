#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bms/severity.hpp"

namespace bms {

/// Transition rules of a bonus-malus scale with levels 0..s.
///
/// A claim-free year moves one level down (never below 0). Each claim of type
/// i moves penalties[i] levels up, capped at the top level s.
class ScaleRules {
 public:
  ScaleRules(std::size_t levels, std::vector<int> penalties);

  std::size_t levels() const noexcept { return levels_; }
  std::size_t top_level() const noexcept { return levels_ - 1; }
  std::span<const int> penalties() const noexcept { return penalties_; }
  int penalty(std::size_t type) const { return penalties_.at(type); }

  /// Level reached from `from` after a year with the given per-type counts.
  std::size_t next_level(std::size_t from, std::span<const int> claim_counts) const;

 private:
  std::size_t levels_;
  std::vector<int> penalties_;
};

/// Dense row-major square matrix of one-step transition probabilities.
///
/// Alongside the numbers it keeps the structural support (which transitions
/// are possible at all), so regularity never depends on whether a tiny entry
/// underflowed.
class TransitionMatrix {
 public:
  /// Wraps an explicit row-stochastic matrix; support is taken as entries > 0.
  TransitionMatrix(std::size_t size, std::vector<double> entries);

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t from, std::size_t to) const { return entries_[from * size_ + to]; }
  bool supported(std::size_t from, std::size_t to) const { return support_[from * size_ + to] != 0; }
  double frequency() const noexcept { return frequency_; }

 private:
  friend TransitionMatrix build_transition_matrix(const ScaleRules&, double, const ClaimTypePartition&);
  TransitionMatrix(std::size_t size, std::vector<double> entries, std::vector<char> support, double frequency)
      : size_(size), entries_(std::move(entries)), support_(std::move(support)), frequency_(frequency) {}

  std::size_t size_;
  std::vector<double> entries_;
  std::vector<char> support_;
  double frequency_ = 0.0;
};

/// Poisson probability P[N = j] for mean `rate`.
double thinned_pmf(double rate, int j);

/// Exact one-step transition matrix for annual claim frequency lambda*theta.
///
/// Entries for targets below the top level are summed over every claim vector
/// producing that exact jump; the top-level entry is the row complement.
TransitionMatrix build_transition_matrix(const ScaleRules& rules, double frequency,
                                         const ClaimTypePartition& partition);

/// Smallest n <= max_power such that P^n is entrywise positive, judged on the
/// structural support. max_power = 0 means (s+1)^2.
std::optional<std::size_t> regularity_index(const TransitionMatrix& p, std::size_t max_power = 0);

/// Solves pi^T (I - P + E) = e^T by Gaussian elimination with partial
/// pivoting. Does not check regularity.
std::vector<double> solve_stationary(const TransitionMatrix& p);

/// Stationary distribution of a regular chain; throws NotRegular otherwise.
std::vector<double> stationary_distribution(const TransitionMatrix& p);

/// Closed-form stationary law of the four-level scale with penalties
/// (1, 2, 3, 3); needs exactly three thresholds.
std::vector<double> closed_form_stationary_4level(double frequency, const ClaimTypePartition& partition);

}  // namespace bms
