#include "sscn/schedule.hpp"

#include <doctest.h>

#include <cmath>

using namespace sscn;

TEST_CASE("constant") {
  ScheduleState st;
  for (int k = 0; k < 5; ++k) {
    CHECK(next_tau(ConstantSchedule{7}, st, 100) == 7);
    finish_iteration(st, 1.0);
  }
}

TEST_CASE("exponential") {
  ScheduleState st;
  st.k = 5;
  CHECK(next_tau(ExponentialSchedule{10, 1, 0}, st, 100) == 11);
  st.k = 10;
  CHECK(next_tau(ExponentialSchedule{1, 1, 1}, st, 100) == 100);
  st.k = 0;
  CHECK(next_tau(ExponentialSchedule{1, 1, 0.5}, st, 100) == 2);
  st.k = 3;
  CHECK(next_tau(ExponentialSchedule{1, 1, 0.5}, st, 100) == static_cast<std::size_t>(std::round(1 + std::exp(1.5))));
  st.k = 100000;
  CHECK(next_tau(ExponentialSchedule{1, 1, 1}, st, 100) == 100);
}

TEST_CASE("adaptive size formula") {
  CHECK(adaptive_tau(0.5, 0.5, 1.0, 1.0, 100) == 1);
  CHECK(adaptive_tau(2.0, 2.0, 1.0, 1.0, 100) == 87);
  CHECK(adaptive_tau(10.0, 0.0, 1.0, 1.0, 100) == 99);
  CHECK(adaptive_tau(0.0, 0.0, 1.0, 1.0, 100) == 1);
  CHECK(adaptive_tau(1e9, 0.0, 1e-9, 1.0, 50) == 50);
}

TEST_CASE("adaptive size is monotone") {
  const double gs[] = {0.5, 1.0, 2.0, 4.0, 8.0};
  for (std::size_t i = 1; i < 5; ++i) {
    CHECK(adaptive_tau(gs[i], 1.0, 1.0, 1.0, 200) >= adaptive_tau(gs[i - 1], 1.0, 1.0, 1.0, 200));
    CHECK(adaptive_tau(1.0, gs[i], 1.0, 1.0, 200) >= adaptive_tau(1.0, gs[i - 1], 1.0, 1.0, 200));
    CHECK(adaptive_tau(3.0, 3.0, gs[i], 1.0, 200) <= adaptive_tau(3.0, 3.0, gs[i - 1], 1.0, 200));
    CHECK(adaptive_tau(3.0, 3.0, 1.0, gs[i], 200) <= adaptive_tau(3.0, 3.0, 1.0, gs[i - 1], 200));
  }
}

TEST_CASE("EMA updates") {
  ScheduleState st;
  st = update_estimates(st, 5.0, 3.0, 0.2);
  CHECK(st.grad_norm_est == 5.0);
  CHECK(st.hess_norm_est == 3.0);
  ScheduleState one;
  one = update_estimates(one, 1.0, 1.0, 0.2);
  one = update_estimates(one, 1.0, 1.0, 0.2);
  CHECK(one.grad_norm_est == 1.0);
  one = update_estimates(one, 2.0, 2.0, 0.2);
  CHECK(one.grad_norm_est == doctest::Approx(1.2));
}

TEST_CASE("adaptive bootstrap and smoothing") {
  const AdaptiveSchedule a{1.0, 0.2, 0.5, 1};
  ScheduleState st;
  CHECK(next_tau(a, st, 100) == 5);
  CHECK(adaptive_bootstrap_tau(10, 1) == 1);
  CHECK(adaptive_bootstrap_tau(1000, 1) == 50);
  CHECK(adaptive_bootstrap_tau(10, 3) == 3);

  st = update_estimates(st, 2.0, 2.0, 0.2);
  finish_iteration(st, 1.0);
  // proposal 87, smoothed 0.5 * 87 + 0.5 * 5 = 46
  CHECK(next_tau(a, st, 100) == 46);
  CHECK(st.prev_tau_smoothed == 46.0);
}

TEST_CASE("validation") {
  CHECK_THROWS(validate(ConstantSchedule{0}, 5));
  CHECK_THROWS(validate(ConstantSchedule{6}, 5));
  CHECK_THROWS(validate(ExponentialSchedule{0.5, 1, 0}, 5));
  CHECK_THROWS(validate(ExponentialSchedule{1, -1, 0}, 5));
  CHECK_THROWS(validate(AdaptiveSchedule{1.0, 0.0, 0.5, 1}, 5));
  CHECK_THROWS(validate(AdaptiveSchedule{1.0, 0.2, 1.5, 1}, 5));
  CHECK_NOTHROW(validate(AdaptiveSchedule{}, 5));
}
