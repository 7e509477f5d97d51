#include "bms/scale.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bms/errors.hpp"

namespace bms {

ScaleRules::ScaleRules(std::size_t levels, std::vector<int> penalties)
    : levels_(levels), penalties_(std::move(penalties)) {
  if (levels_ < 2) throw Error(ErrorCode::InvalidArgument, "a scale needs at least two levels");
  if (penalties_.empty()) throw Error(ErrorCode::InvalidArgument, "penalty list is empty");
  for (std::size_t i = 0; i < penalties_.size(); ++i) {
    if (penalties_[i] < 1) {
      throw Error(ErrorCode::ZeroPenalty,
                  "penalty for claim type " + std::to_string(i) + " must be at least one level");
    }
    if (i > 0 && penalties_[i] < penalties_[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "penalties must be nondecreasing in claim type");
    }
  }
}

std::size_t ScaleRules::next_level(std::size_t from, std::span<const int> claim_counts) const {
  if (claim_counts.size() != penalties_.size()) {
    throw Error(ErrorCode::InvalidArgument, "claim count vector does not match the number of claim types");
  }
  long jump = 0;
  for (std::size_t i = 0; i < claim_counts.size(); ++i) jump += static_cast<long>(claim_counts[i]) * penalties_[i];
  if (jump == 0) return from == 0 ? 0 : from - 1;
  return std::min<std::size_t>(top_level(), from + static_cast<std::size_t>(jump));
}

TransitionMatrix::TransitionMatrix(std::size_t size, std::vector<double> entries)
    : size_(size), entries_(std::move(entries)), support_(size * size, 0) {
  if (size_ == 0 || entries_.size() != size_ * size_) {
    throw Error(ErrorCode::InvalidArgument, "transition matrix must be square and nonempty");
  }
  for (std::size_t i = 0; i < size_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < size_; ++j) {
      const double v = entries_[i * size_ + j];
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidArgument, "transition entry outside [0, 1]");
      support_[i * size_ + j] = v > 0.0 ? 1 : 0;
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "transition row does not sum to 1");
  }
}

double thinned_pmf(double rate, int j) {
  if (j < 0 || !(rate >= 0.0)) return 0.0;
  if (rate == 0.0) return j == 0 ? 1.0 : 0.0;
  if (j == 0) return std::exp(-rate);
  return std::exp(j * std::log(rate) - rate - std::lgamma(j + 1.0));
}

namespace {

// Sums the probability of every claim vector whose total penalty is exactly
// `remaining`, over types first..m.
struct JumpEnumerator {
  std::span<const int> penalties;
  std::span<const double> rates;

  // Returns {probability, found_any_vector}.
  std::pair<double, bool> sum(std::size_t type, int remaining) const {
    if (type == penalties.size()) return {remaining == 0 ? 1.0 : 0.0, remaining == 0};
    double total = 0.0;
    bool any = false;
    for (int n = 0; n * penalties[type] <= remaining; ++n) {
      auto [p, found] = sum(type + 1, remaining - n * penalties[type]);
      if (!found) continue;
      total += thinned_pmf(rates[type], n) * p;
      any = true;
    }
    return {total, any};
  }
};

}  // namespace

TransitionMatrix build_transition_matrix(const ScaleRules& rules, double frequency,
                                         const ClaimTypePartition& partition) {
  if (!(frequency >= 0.0) || !std::isfinite(frequency)) {
    throw Error(ErrorCode::InvalidArgument, "claim frequency must be finite and >= 0");
  }
  if (rules.penalties().size() != partition.type_count()) {
    throw Error(ErrorCode::InvalidArgument, "scale has " + std::to_string(rules.penalties().size()) +
                                                " penalties but the partition has " +
                                                std::to_string(partition.type_count()) + " claim types");
  }
  for (int pen : rules.penalties()) {
    if (pen < 1) throw Error(ErrorCode::ZeroPenalty, "zero penalty makes the jump enumeration unbounded");
  }

  const std::size_t n = rules.levels();
  const std::size_t top = rules.top_level();
  std::vector<double> rates(partition.type_count());
  for (std::size_t i = 0; i < rates.size(); ++i) rates[i] = frequency * partition.probability(i);
  const JumpEnumerator jumps{rules.penalties(), rates};
  const double no_claim = std::exp(-frequency);

  std::vector<double> entries(n * n, 0.0);
  std::vector<char> support(n * n, 0);
  for (std::size_t from = 0; from < n; ++from) {
    double* row = &entries[from * n];
    char* row_support = &support[from * n];
    const std::size_t down = from == 0 ? 0 : from - 1;
    row[down] += no_claim;
    row_support[down] = 1;
    if (frequency > 0.0) {
      for (std::size_t to = from + 1; to < top; ++to) {
        auto [p, found] = jumps.sum(0, static_cast<int>(to - from));
        row[to] += p;
        if (found) row_support[to] = 1;
      }
      row_support[top] = 1;
    }
    double below_top = 0.0;
    for (std::size_t to = 0; to < top; ++to) below_top += row[to];
    row[top] = std::clamp(1.0 - below_top, 0.0, 1.0);
  }
  return TransitionMatrix(n, std::move(entries), std::move(support), frequency);
}

std::optional<std::size_t> regularity_index(const TransitionMatrix& p, std::size_t max_power) {
  const std::size_t n = p.size();
  if (max_power == 0) max_power = n * n;

  std::vector<char> base(n * n), power(n * n), next(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) base[i * n + j] = p.supported(i, j) ? 1 : 0;
  power = base;

  for (std::size_t k = 1; k <= max_power; ++k) {
    if (std::all_of(power.begin(), power.end(), [](char c) { return c != 0; })) return k;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        char reach = 0;
        for (std::size_t l = 0; l < n && !reach; ++l) reach = power[i * n + l] && base[l * n + j];
        next[i * n + j] = reach;
      }
    }
    power.swap(next);
  }
  return std::nullopt;
}

std::vector<double> solve_stationary(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  // a = (I - P + E)^T, augmented with the right-hand side e.
  std::vector<double> a(n * (n + 1));
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * (n + 1) + j]; };
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      at(i, j) = (i == j ? 1.0 : 0.0) - p(j, i) + 1.0;
      scale = std::max(scale, std::abs(at(i, j)));
    }
    at(i, n) = 1.0;
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
    if (!(std::abs(at(pivot, col)) > 1e-14 * scale)) {
      throw Error(ErrorCode::SingularSystem, "I - P + E is numerically singular");
    }
    if (pivot != col)
      for (std::size_t j = col; j <= n; ++j) std::swap(at(col, j), at(pivot, j));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = at(r, col) / at(col, col);
      if (factor == 0.0) continue;
      for (std::size_t j = col; j <= n; ++j) at(r, j) -= factor * at(col, j);
    }
  }

  std::vector<double> pi(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = at(i, n);
    for (std::size_t j = i + 1; j < n; ++j) acc -= at(i, j) * pi[j];
    pi[i] = acc / at(i, i);
  }
  return pi;
}

std::vector<double> stationary_distribution(const TransitionMatrix& p) {
  if (!regularity_index(p)) {
    throw Error(ErrorCode::NotRegular, "transition matrix is not regular; no unique stationary distribution");
  }
  std::vector<double> pi = solve_stationary(p);
  // Rounding can leave -1e-17 on levels with vanishing mass.
  for (double& v : pi) {
    if (!std::isfinite(v)) throw Error(ErrorCode::SingularSystem, "stationary solve produced a non-finite value");
    v = std::max(v, 0.0);
  }
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= total;
  return pi;
}

std::vector<double> closed_form_stationary_4level(double frequency, const ClaimTypePartition& partition) {
  if (partition.threshold_count() != 3) {
    throw Error(ErrorCode::InvalidArgument, "closed form covers exactly four claim types");
  }
  if (!(frequency >= 0.0)) throw Error(ErrorCode::InvalidArgument, "claim frequency must be >= 0");

  const double lt = frequency;
  const double q0 = partition.probability(0);
  const double q1 = partition.probability(1);
  const double e1 = std::exp(-lt);
  const double e2 = std::exp(-2.0 * lt);
  const double e3 = std::exp(-3.0 * lt);
  const double half_sq = 0.5 * (lt * q0) * (lt * q0);

  const double delta = 1.0 - 2.0 * lt * q0 * e2 - lt * q1 * e3 - half_sq * e3;
  return {
      e3 / delta,
      (e2 - e3) / delta,
      (e1 - e2 - lt * q0 * e3) / delta,
      (-std::expm1(-lt) - 2.0 * lt * q0 * e2 + lt * (q0 - q1) * e3 - half_sq * e3) / delta,
  };
}

}  // namespace bms
