#include <doctest.h>

#include <initializer_list>

#include "commalab/stats.hpp"

using namespace commalab;

TEST_CASE("RunningStat matches hand-computed moments") {
  RunningStat s;
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.add(x);
  CHECK(s.count == 4);
  CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(s.variance() == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(s.std_error() ==
        doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("RunningStat degenerate counts") {
  RunningStat s;
  CHECK(s.variance() == 0.0);
  CHECK(s.std_error() == 0.0);
  s.add(7.0);
  CHECK(s.mean == 7.0);
  CHECK(s.variance() == 0.0);
}

TEST_CASE("Wilson interval frozen at 8 of 10") {
  const Interval iv = wilson_interval(8, 10, 1.959963984540054);
  CHECK(iv.low == doctest::Approx(0.49016247153664174).epsilon(1e-13));
  CHECK(iv.high == doctest::Approx(0.94331784854562474).epsilon(1e-13));
}

TEST_CASE("Wilson interval edge cases") {
  const Interval empty = wilson_interval(0, 0, 1.96);
  CHECK(empty.low == 0.0);
  CHECK(empty.high == 1.0);
  const Interval all = wilson_interval(20, 20, 1.96);
  CHECK(all.low > 0.8);
  CHECK(all.high <= 1.0 + 1e-12);
  const Interval none = wilson_interval(0, 20, 1.96);
  CHECK(none.low >= -1e-12);
  CHECK(none.high < 0.2);
}

TEST_CASE("proportion standard error") {
  CHECK(proportion_std_error(0.5, 100) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(proportion_std_error(0.5, 0) == 0.0);
  CHECK(proportion_std_error(0.0, 50) == 0.0);
}

TEST_CASE("mean interval uses z standard errors") {
  RunningStat s;
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.add(x);
  const Interval iv = mean_interval(s, 2.0);
  const double half = 2.0 * s.std_error();
  CHECK(iv.low == doctest::Approx(2.5 - half).epsilon(1e-14));
  CHECK(iv.high == doctest::Approx(2.5 + half).epsilon(1e-14));
}
