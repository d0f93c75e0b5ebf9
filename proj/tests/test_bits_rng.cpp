#include <doctest.h>

#include <cstdint>
#include <vector>

#include "commalab/bits.hpp"
#include "commalab/rng.hpp"
#include "commalab/sampling.hpp"
#include "commalab/stats.hpp"

using namespace commalab;

TEST_CASE("BitVector basic operations") {
  BitVector v(70);
  CHECK(v.size() == 70);
  CHECK(v.count_ones() == 0);
  v.set(0);
  v.set(63);
  v.set(64);
  v.set(69);
  CHECK(v.count_ones() == 4);
  CHECK(v.test(63));
  CHECK(v.test(64));
  CHECK_FALSE(v.test(1));
  v.flip(63);
  CHECK_FALSE(v.test(63));
  CHECK(v.count_ones() == 3);
  v.flip(1);
  CHECK(v.test(1));
  v.clear();
  CHECK(v.count_ones() == 0);
  CHECK_FALSE(v.all_ones());
}

TEST_CASE("BitVector all_ones and equality") {
  BitVector a(65);
  for (int i = 0; i < 65; ++i) a.set(i);
  CHECK(a.all_ones());
  BitVector b(65);
  CHECK_FALSE(a == b);
  for (int i = 0; i < 65; ++i) b.set(i);
  CHECK(a == b);
  BitVector c(64);
  CHECK_FALSE(a == c);
}

TEST_CASE("BitVector mask_tail clears bits past the length") {
  BitVector v(10);
  v.words()[0] = ~std::uint64_t{0};
  v.mask_tail();
  CHECK(v.count_ones() == 10);
  for (int i = 0; i < 10; ++i) CHECK(v.test(i));
}

TEST_CASE("RngStream is reproducible per (seed, stream)") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  RngStream c(42, 8);
  RngStream d(43, 7);
  CHECK(RngStream(42, 7)() != c());
  CHECK(RngStream(42, 7)() != d());
}

TEST_CASE("RngStream child streams are stable and distinct") {
  RngStream root(99);
  RngStream c1 = root.child(1);
  RngStream c2 = root.child(2);
  RngStream c1_again = root.child(1);
  CHECK(c1() == c1_again());
  CHECK(c1.stream() != c2.stream());
  CHECK(c1() != c2());
  RngStream grand = root.child(1).child(5);
  CHECK(grand() == root.child(1).child(5)());
}

TEST_CASE("uniform01 stays in [0, 1) and below stays in range") {
  RngStream rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 50000; ++i) {
    const std::uint64_t k = rng.below(10);
    REQUIRE(k < 10);
    ++counts[k];
  }
  // Each bucket expects 5000 draws with sigma sqrt(50000*0.1*0.9) = 67.
  for (int c : counts) {
    CHECK(c > 5000 - 6 * 67);
    CHECK(c < 5000 + 6 * 67);
  }
}

TEST_CASE("sample_binomial handles degenerate parameters") {
  RngStream rng(3);
  CHECK(sample_binomial(rng, 0, 0.5) == 0);
  CHECK(sample_binomial(rng, 10, 0.0) == 0);
  CHECK(sample_binomial(rng, 10, 1.0) == 10);
  for (int i = 0; i < 100; ++i) {
    const int k = sample_binomial(rng, 20, 0.3);
    CHECK(k >= 0);
    CHECK(k <= 20);
  }
}

TEST_CASE("SmallMeanBinomial matches the exact distribution") {
  const int m = 150;
  const double p = 1.0 / 150.0;
  SmallMeanBinomial table(m, p);
  RngStream rng(11);
  RunningStat stat;
  std::vector<long long> hist(8, 0);
  const long long draws = 200000;
  for (long long i = 0; i < draws; ++i) {
    const int k = table.draw(rng);
    REQUIRE(k >= 0);
    REQUIRE(k <= m);
    stat.add(k);
    if (k < static_cast<int>(hist.size())) ++hist[k];
  }
  // Mean m*p = 1, variance m*p*(1-p); six-sigma window on the sample mean.
  const double se = std::sqrt(1.0 * (1.0 - p) / static_cast<double>(draws));
  CHECK(stat.mean > 1.0 - 6 * se);
  CHECK(stat.mean < 1.0 + 6 * se);
  // Pr(0) = (1-1/150)^150 = 0.36665; six-sigma window on the frequency.
  const double f0 = static_cast<double>(hist[0]) / static_cast<double>(draws);
  const double se0 = std::sqrt(0.36665 * (1 - 0.36665) / draws);
  CHECK(f0 > 0.36665 - 6 * se0);
  CHECK(f0 < 0.36665 + 6 * se0);
}

TEST_CASE("SmallMeanBinomial degenerate parameters") {
  RngStream rng(5);
  SmallMeanBinomial zero(0, 0.5);
  CHECK(zero.draw(rng) == 0);
  SmallMeanBinomial none(10, 0.0);
  CHECK(none.draw(rng) == 0);
  SmallMeanBinomial all(4, 1.0);
  CHECK(all.draw(rng) == 4);
}
