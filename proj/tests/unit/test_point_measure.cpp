#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "blp/point_measure.hpp"
#include "doctest.h"

using blp::RankedPointMeasure;
using blp::Theta;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_atoms(std::mt19937_64& gen, std::size_t max_size) {
  std::uniform_int_distribution<std::size_t> size(0, max_size);
  std::uniform_int_distribution<int> grid(-40, 12);
  std::vector<double> xs(size(gen));
  for (double& x : xs) x = grid(gen) / 4.0;
  return xs;
}

}  // namespace

TEST_CASE("ranking and cemetery") {
  const RankedPointMeasure mu{-1.0, 2.0, -kInf, 0.5};
  CHECK(mu.size() == 3);
  CHECK(mu[0] == 2.0);
  CHECK(mu[2] == -1.0);
  CHECK(mu.tail_count(0.0) == 2);
  CHECK_THROWS_AS(RankedPointMeasure({std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(RankedPointMeasure({kInf}), std::invalid_argument);
  CHECK_THROWS_AS(Theta(-0.1), std::invalid_argument);
}

TEST_CASE("translate") {
  const RankedPointMeasure mu{0.0, -1.0};
  CHECK(translate(mu, 0.0) == mu);
  CHECK(translate(mu, 1.0) == RankedPointMeasure{1.0, 0.0});
  CHECK(translate(mu, -kInf).empty());
}

TEST_CASE("weighted_integral") {
  auto one = [](double) { return 1.0; };
  CHECK(weighted_integral(RankedPointMeasure::dirac(0.0), Theta(0.7), one) == 1.0);
  CHECK(weighted_integral(RankedPointMeasure{}, Theta(3.0), one) == 0.0);
  CHECK(weighted_integral(RankedPointMeasure{0.0, 0.0}, Theta(0.0), one) == 2.0);
  CHECK_THROWS_AS(weighted_integral(RankedPointMeasure{800.0}, Theta(1.0), one), blp::OverflowError);
}

TEST_CASE("truncate") {
  CHECK(truncate(RankedPointMeasure{0.0, -1.0, -3.0}, 2.0) == RankedPointMeasure{0.0, -1.0});
  CHECK(truncate(RankedPointMeasure{0.0, -2.0}, 2.0) == RankedPointMeasure{0.0, -2.0});
  const RankedPointMeasure mu{1.0, -1.5, -4.0};
  CHECK(truncate(truncate(mu, 3.0), 1.0) == RankedPointMeasure{1.0});
  CHECK(truncate(truncate(mu, 3.0), 1.0) == truncate(mu, 1.0));
}

TEST_CASE("superpose") {
  CHECK(superpose(RankedPointMeasure{}, RankedPointMeasure{}).empty());
  CHECK(superpose(RankedPointMeasure{0.0}, RankedPointMeasure{1.0, -1.0}) == RankedPointMeasure{1.0, 0.0, -1.0});
  const std::vector<RankedPointMeasure> one{RankedPointMeasure{0.0, 0.0}};
  CHECK(superpose(one) == RankedPointMeasure{0.0, 0.0});
}

TEST_CASE("ranking idempotence over permutations") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 200; ++rep) {
    auto xs = random_atoms(gen, 12);
    const RankedPointMeasure ref(xs);
    std::shuffle(xs.begin(), xs.end(), gen);
    CHECK(RankedPointMeasure(xs) == ref);
    CHECK(RankedPointMeasure(std::vector<double>(ref.atoms().begin(), ref.atoms().end())) == ref);
  }
}

TEST_CASE("translation homomorphism") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> shift(-20, 20);
  for (int rep = 0; rep < 200; ++rep) {
    const RankedPointMeasure mu(random_atoms(gen, 10));
    const double y = shift(gen) / 8.0;
    const double y2 = shift(gen) / 8.0;
    CHECK(translate(translate(mu, y), y2) == translate(mu, y + y2));
  }
}

TEST_CASE("weighted integral is additive under superpose") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(-3.0, 1.0);
  auto f = [](double x) { return 1.0 + x * x; };
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(gen() % 8), b(gen() % 8);
    for (double& x : a) x = u(gen);
    for (double& x : b) x = u(gen);
    const RankedPointMeasure ma(a), mb(b);
    const Theta th(0.8);
    const double lhs = weighted_integral(superpose(ma, mb), th, f);
    const double rhs = weighted_integral(ma, th, f) + weighted_integral(mb, th, f);
    const double ulp = std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(rhs));
    CHECK(std::abs(lhs - rhs) <= static_cast<double>(a.size() + b.size() + 1) * ulp * 4);
  }
}

TEST_CASE("truncation compatibility on random measures") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> lvl(1, 40);
  for (int rep = 0; rep < 500; ++rep) {
    const RankedPointMeasure mu(random_atoms(gen, 15));
    double n = lvl(gen) / 4.0, m = lvl(gen) / 4.0;
    if (n > m) std::swap(n, m);
    CHECK(truncate(truncate(mu, m), n) == truncate(mu, n));
  }
}

TEST_CASE("included_in") {
  CHECK(RankedPointMeasure{0.0}.included_in(RankedPointMeasure{1.0, 0.0}));
  CHECK_FALSE(RankedPointMeasure{0.0, 0.0}.included_in(RankedPointMeasure{1.0, 0.0}));
  CHECK(RankedPointMeasure{}.included_in(RankedPointMeasure{}));
}

TEST_CASE("csv round trip is exact") {
  std::mt19937_64 gen(19);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> xs(gen() % 6);
    for (double& x : xs) x = g(gen);
    const RankedPointMeasure mu(xs);
    CHECK(blp::from_csv_line(blp::to_csv_line(mu)) == mu);
  }
  CHECK(blp::to_csv_line(RankedPointMeasure{}).empty());
  CHECK(blp::from_csv_line("").empty());
  CHECK(blp::to_csv_line(RankedPointMeasure{0.5, -1.0}) == "0.5,-1");
  CHECK_THROWS(blp::from_csv_line("1,abc"));
}
