#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "bms/deductible.hpp"
#include "bms/roots.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using bms::DeductibleSchedule;
using bms::ErrorCode;
using bms::ScheduleCheck;

namespace {

const fixture::Tariff& ex3() { return fixture::coarse(); }
const std::vector<double>& r3() { return ex3().profile.relativities; }

double residual(const DeductibleSchedule& s, std::size_t k) {
  const auto& t = ex3();
  return std::abs(s.alphas[k] * t.model.mean() - bms::indifference_rhs(t.model, t.partition, s.deductibles[k]));
}

// Relativities with a wide gap below the top level, so the top-level bound is
// the deductible limit f / E[C] rather than the premium ordering.
const std::vector<double> kWideGap{0.5, 1.2, 10.0};

std::vector<bms::ManualLevel> manual(std::vector<double> alphas, std::vector<std::vector<std::optional<double>>> rows) {
  std::vector<bms::ManualLevel> out;
  for (std::size_t k = 0; k < alphas.size(); ++k) out.push_back({alphas[k], rows[k]});
  return out;
}

constexpr std::nullopt_t kFree = std::nullopt;

}  // namespace

TEST_SUITE("deductible") {

TEST_CASE("expected deductible per claim") {
  const auto& t = ex3();
  CHECK(bms::indifference_rhs(t.model, t.partition, std::vector<double>{0, 0, 0, 0}) == 0.0);
  CHECK(bms::indifference_rhs(t.model, t.partition, std::vector<double>{1, 1, 2, 4}) ==
        doctest::Approx(bms::max_penalty_f(t.model, t.partition)).epsilon(1e-15));
  // Table 3 top row: 0.7389 q_3 is the 0.05 E[C] budget.
  CHECK(std::abs(bms::indifference_rhs(t.model, t.partition, std::vector<double>{0, 0, 0, 0.7389}) - 0.1) < 5e-5);

  CHECK(code_of([&] { bms::indifference_rhs(t.model, t.partition, std::vector<double>{0, 0, 0, 4.5}); }) ==
        ErrorCode::Assumption2Violation);
  CHECK(code_of([&] { bms::indifference_rhs(t.model, t.partition, std::vector<double>{0, 0.5, 0.2, 1}); }) ==
        ErrorCode::Assumption2Violation);
  CHECK(code_of([&] { bms::indifference_rhs(t.model, t.partition, std::vector<double>{-0.1, 0, 0, 1}); }) ==
        ErrorCode::Assumption2Violation);
}

TEST_CASE("alpha bounds") {
  const auto& t = ex3();
  const double top = bms::alpha_upper_bound(3, r3(), t.model, t.partition, true);
  CHECK(std::abs(top - 0.1348) < 5e-4);
  CHECK(top == doctest::Approx(1.0 - r3()[2] / r3()[3]).epsilon(1e-15));
  CHECK(std::abs(bms::max_penalty_f(t.model, t.partition) / t.model.mean() - 0.7127) < 5e-4);

  const double level1 = bms::alpha_upper_bound(1, r3(), t.model, t.partition, false);
  CHECK(level1 == doctest::Approx(std::min(1.0 - 1.0 / r3()[1], 1.425489 / 2.0)).epsilon(1e-6));
  CHECK(0.35 <= level1);

  const std::vector<double> barely{0.5, std::nextafter(1.0, 2.0)};
  CHECK(bms::alpha_upper_bound(1, barely, t.model, t.partition, false) < 1e-15);
  CHECK(code_of([&] { bms::alpha_upper_bound(0, r3(), t.model, t.partition, false); }) == ErrorCode::NotInMalusZone);
}

TEST_CASE("validation of the printed types 1-3 schedule") {
  const auto& t = ex3();
  DeductibleSchedule s{1, 3, {0.35, 0.40, 0.45}, {{0, 0.3, 1.3, 2.4096}, {0, 0.5, 1.4, 2.6239}, {0, 0.7, 1.5, 2.8383}}};
  const auto report = bms::validate_schedule(s, r3(), t.model, t.partition, 5e-3);
  CHECK(report.ok());
  for (const auto& lv : report.levels) CHECK(std::abs(lv.residual) < 5e-3);

  auto broken = s;
  broken.deductibles[1][3] = 2.9;  // above the level-3 value
  const auto bad = bms::validate_schedule(broken, r3(), t.model, t.partition, 5e-3);
  CHECK(bad.failed(ScheduleCheck::DeductibleLevelOrder));
  CHECK(bms::is_deductible_check(ScheduleCheck::DeductibleLevelOrder));
  CHECK_FALSE(bms::is_deductible_check(ScheduleCheck::Indifference));
}

TEST_CASE("an alpha above the deductible limit cannot be balanced") {
  const auto& t = ex3();
  const double limit = bms::max_penalty_f(t.model, t.partition) / t.model.mean();
  DeductibleSchedule s = DeductibleSchedule::zero(1, 3, 4);
  s.alphas = {limit + 1e-3, limit + 1e-3, limit + 1e-3};
  for (auto& row : s.deductibles) row = {1, 1, 2, 4};
  const auto report = bms::validate_schedule(s, std::vector<double>{0.5, 10, 20, 30}, t.model, t.partition);
  CHECK(report.failed(ScheduleCheck::Indifference));
}

TEST_CASE("single-type allocation") {
  const auto& t = ex3();
  const auto s5 = bms::allocate_single_type(std::vector<double>{0.06, 0.13, 0.24}, r3(), t.model, t.partition);
  const double want5[] = {0.8867, 1.9212, 3.5467};
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(std::abs(s5.deductibles[k][3] - want5[k]) < 5e-5);
    CHECK(s5.deductibles[k][0] == 0.0);
    CHECK(residual(s5, k) < 1e-9);
  }
  const auto s6 = bms::allocate_single_type(std::vector<double>{0.24, 0.25, 0.26}, r3(), t.model, t.partition);
  const double want6[] = {3.5467, 3.6945, 3.8423};
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(s6.deductibles[k][3] - want6[k]) < 5e-5);

  const auto zero = bms::allocate_single_type(std::vector<double>{0, 0, 0}, r3(), t.model, t.partition);
  for (const auto& row : zero.deductibles)
    for (double d : row) CHECK(d == 0.0);

  CHECK(code_of([&] {
          bms::allocate_single_type(std::vector<double>{0.06, 0.13, 0.30}, r3(), t.model, t.partition);
        }) == ErrorCode::AlphaOutOfRange);
  CHECK(code_of([&] {
          bms::allocate_single_type(std::vector<double>{0.13, 0.06, 0.24}, r3(), t.model, t.partition);
        }) == ErrorCode::MonotonicityViolation);
}

TEST_CASE("proportional top-level allocation") {
  const auto& t = ex3();
  CHECK(std::abs(bms::proportional_coefficient_bound(t.model, t.partition) - 0.6667) < 5e-4);

  const auto a = bms::allocate_proportional_top(0.05, r3(), t.model, t.partition);
  CHECK(std::abs(a.coefficient - 0.050066) < 1e-5);
  const double want1[] = {0.0230, 0.0730, 0.1420, 0.3004};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a.schedule.deductibles[2][i] - want1[i]) < 5e-5);
  CHECK(residual(a.schedule, 2) < 1e-9);
  CHECK(a.schedule.alphas[0] == 0.0);
  CHECK(a.schedule.alphas[1] == 0.0);

  const auto b = bms::allocate_proportional_top(0.13, r3(), t.model, t.partition);
  CHECK(std::abs(b.coefficient - 0.130443) < 1e-5);
  const double want2[] = {0.0598, 0.1903, 0.3699, 0.7827};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(b.schedule.deductibles[2][i] - want2[i]) < 5e-5);

  const double bound = bms::alpha_upper_bound(3, r3(), t.model, t.partition, true);
  CHECK(code_of([&] { bms::allocate_proportional_top(bound, r3(), t.model, t.partition); }) ==
        ErrorCode::AlphaOutOfRange);
  CHECK(code_of([&] { bms::allocate_proportional_top(bound + 0.01, r3(), t.model, t.partition); }) ==
        ErrorCode::AlphaOutOfRange);
}

TEST_CASE("proportional coefficient is the unique root") {
  const auto& t = ex3();
  const double x0 = bms::proportional_coefficient_bound(t.model, t.partition);
  for (double alpha : {0.01, 0.05, 0.1, 0.13}) {
    const double target = alpha * t.model.mean();
    auto f = [&](double x) { return bms::proportional_rhs(x, t.model, t.partition) - target; };
    boost::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(f, 0.0, x0, boost::math::tools::eps_tolerance<double>(50),
                                                        iters);
    const double independent = 0.5 * (root.first + root.second);
    const double ours = bms::allocate_proportional_top(alpha, r3(), t.model, t.partition).coefficient;
    CHECK(std::abs(independent - ours) < 1e-10);
    // Bisection squeezing from the top end lands on the same point.
    const auto from_top = bms::bisect_increasing([&](double x) { return -f(x0 - x); }, 0.0, 0.0, x0, 1e-13);
    CHECK(std::abs((x0 - from_top.mid()) - ours) < 1e-10);
  }
}

TEST_CASE("proportional allocation can be infeasible") {
  const auto& t = ex3();
  const double x0 = bms::proportional_coefficient_bound(t.model, t.partition);
  const double reach = bms::proportional_rhs(x0, t.model, t.partition) / t.model.mean();
  const double bound = bms::alpha_upper_bound(2, kWideGap, t.model, t.partition, true);
  REQUIRE(reach < bound);
  CHECK(code_of([&] {
          bms::allocate_proportional_top(0.5 * (reach + bound), kWideGap, t.model, t.partition);
        }) == ErrorCode::InfeasibleProportional);
}

TEST_CASE("greedy top-level allocation") {
  const auto& t = ex3();
  const auto a = bms::allocate_greedy_top(0.05, r3(), t.model, t.partition);
  CHECK(std::abs(a.deductibles[2][3] - 0.7389) < 5e-5);
  CHECK(a.deductibles[2][2] == 0.0);
  const auto b = bms::allocate_greedy_top(0.13, r3(), t.model, t.partition);
  CHECK(std::abs(b.deductibles[2][3] - 1.9212) < 5e-5);
  CHECK(residual(b, 2) < 1e-9);

  // Budget exactly c_3 q_3: the top type saturates and nothing else is used.
  const double edge = 4.0 * t.partition.probability(3) / t.model.mean();
  const auto c = bms::allocate_greedy_top(edge, kWideGap, t.model, t.partition);
  CHECK(c.deductibles[1][3] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(c.deductibles[1][2] == 0.0);

  // Close to the limit the walk reaches type 0.
  const double limit = bms::max_penalty_f(t.model, t.partition) / t.model.mean();
  const auto d = bms::allocate_greedy_top(limit - 1e-3, kWideGap, t.model, t.partition);
  CHECK(d.deductibles[1][0] > 0.0);
  CHECK(d.deductibles[1][1] == 1.0);
  CHECK(std::abs((limit - 1e-3) * 2.0 - bms::indifference_rhs(t.model, t.partition, d.deductibles[1])) < 1e-9);
  const auto full = bms::allocate_greedy_top(limit, kWideGap, t.model, t.partition);
  // g is flat at the cap, so d_0 is only pinned to about sqrt(tol); the
  // budget itself is met tightly.
  CHECK(std::abs(full.deductibles[1][0] - 1.0) < 1e-4);
  CHECK(std::abs(limit * 2.0 - bms::indifference_rhs(t.model, t.partition, full.deductibles[1])) < 1e-9);

  const double bound = bms::alpha_upper_bound(3, r3(), t.model, t.partition, true);
  CHECK(code_of([&] { bms::allocate_greedy_top(bound + 1e-4, r3(), t.model, t.partition); }) ==
        ErrorCode::AlphaOutOfRange);
  CHECK_NOTHROW(bms::allocate_greedy_top(bound, r3(), t.model, t.partition));
}

TEST_CASE("uniform schedule") {
  const auto& t = ex3();
  const auto s = bms::uniform_schedule(r3(), t.model, t.partition);
  const double alpha = 1.0 - 1.0 / r3()[1];
  CHECK(std::abs(alpha - 0.3955) < 5e-4);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(s.alphas[k] == doctest::Approx(alpha).epsilon(1e-15));
    CHECK(residual(s, k) < 1e-9);
    CHECK(s.deductibles[k] == s.deductibles[0]);
  }

  // Large relativities: only the maximal deductibles reach f.
  const std::vector<double> steep{0.5, 10.0, 20.0};
  const auto u = bms::uniform_schedule(steep, t.model, t.partition);
  CHECK(u.alphas[0] == doctest::Approx(bms::max_penalty_f(t.model, t.partition) / 2.0).epsilon(1e-15));
  CHECK(u.deductibles[1] == std::vector<double>{1, 1, 2, 4});

  CHECK(code_of([&] { bms::uniform_schedule(r3(), t.model, t.partition, std::vector<double>{0, 0, 0, 0}); }) ==
        ErrorCode::ManualDInconsistent);
  const auto given = bms::uniform_schedule(r3(), t.model, t.partition, s.deductibles[0]);
  CHECK(given.deductibles[2] == s.deductibles[0]);
}

TEST_CASE("manual schedules solve the free coordinate") {
  const auto& t = ex3();
  const auto s7 = bms::allocate_manual(
      manual({0.24, 0.25, 0.26}, {{0, 0, 1.1, kFree}, {0, 0, 1.1, kFree}, {0, 0, 1.1, kFree}}), r3(), t.model,
      t.partition);
  const double want7[] = {1.6566, 1.8044, 1.9522};
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(std::abs(s7.deductibles[k][3] - want7[k]) < 5e-5);
    CHECK(residual(s7, k) < 1e-9);
  }

  const auto s9 = bms::allocate_manual(
      manual({0.35, 0.40, 0.45}, {{0, 0.3, 1.3, kFree}, {0, 0.5, 1.4, kFree}, {0, 0.7, 1.5, kFree}}), r3(), t.model,
      t.partition);
  const double want9[] = {2.4096, 2.6239, 2.8383};
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(s9.deductibles[k][3] - want9[k]) < 5e-5);

  // The free coordinate may sit anywhere, including type 0.
  const auto s0 = bms::allocate_manual(
      manual({0.32, 0.33, 0.34}, {{kFree, 1, 1, 1}, {kFree, 1, 1, 1}, {kFree, 1, 1, 1}}), r3(), t.model, t.partition);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(s0.deductibles[k][0] > 0.0);
    CHECK(residual(s0, k) < 1e-9);
  }

  CHECK(code_of([&] {
          bms::allocate_manual(manual({0.24, 0.25, 0.26}, {{0, 0, kFree, kFree}, {0, 0, 1.1, kFree}, {0, 0, 1.1, kFree}}),
                               r3(), t.model, t.partition);
        }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] {
          bms::allocate_manual(manual({0.24, 0.25, 0.60}, {{0, 0, 1.1, kFree}, {0, 0, 1.1, kFree}, {0, 0, 1.1, kFree}}),
                               r3(), t.model, t.partition);
        }) == ErrorCode::ManualDInconsistent);
  CHECK(code_of([&] {
          bms::allocate_manual(manual({0.24, 0.25, 0.26}, {{0, 0, 1.1, 1.6}, {0, 0, 1.1, kFree}, {0, 0, 1.1, kFree}}),
                               r3(), t.model, t.partition);
        }) == ErrorCode::ManualDInconsistent);
}

TEST_CASE("allocators refuse to emit schedules that break the assumptions") {
  const auto& t = ex3();
  // Deductibles fall from level 2 to level 3 for type 2.
  CHECK(code_of([&] {
          bms::allocate_manual(manual({0.35, 0.40, 0.45}, {{0, 0, 1.5, kFree}, {0, 0, 1.9, kFree}, {0, 0, 1.7, kFree}}),
                               r3(), t.model, t.partition);
        }) == ErrorCode::ScheduleInvalid);
}

}  // TEST_SUITE
