#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ucalib/errors.hpp"
#include "ucalib/rng.hpp"
#include "ucalib/stats.hpp"

using namespace ucalib;
using namespace ucalib::stats;

namespace {

RunMatrix runs_of(std::vector<std::string> methods, std::vector<std::vector<double>> rows) {
  return RunMatrix::checked(std::move(methods), Matrix::from_rows(rows));
}

}  // namespace

TEST_CASE("friedman: identical ranking across 30 runs of 4 methods") {
  std::vector<std::vector<double>> rows(30, {1.0, 2.0, 3.0, 4.0});
  auto result = friedman(runs_of({"a", "b", "c", "d"}, rows));
  CHECK(result.chi2 == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(result.p_value < 3e-19);
  CHECK(result.p_value > 1e-19);  // reported value is 2.19e-19
  CHECK(result.average_ranks == std::vector<double>{1.0, 2.0, 3.0, 4.0});
}

TEST_CASE("friedman: two methods with a total order") {
  std::vector<std::vector<double>> rows(10, {0.1, 0.9});
  auto result = friedman(runs_of({"a", "b"}, rows));
  CHECK(result.average_ranks[0] == doctest::Approx(1.0));
  CHECK(result.average_ranks[1] == doctest::Approx(2.0));
  CHECK(result.chi2 == doctest::Approx(10.0));
}

TEST_CASE("friedman: fully tied rows give statistic 0 and p 1") {
  std::vector<std::vector<double>> rows(6, {0.5, 0.5});
  auto result = friedman(runs_of({"a", "b"}, rows));
  CHECK(result.chi2 == 0.0);
  CHECK(result.p_value == 1.0);
  CHECK(result.average_ranks[0] == doctest::Approx(1.5));
  CHECK(result.average_ranks[1] == doctest::Approx(1.5));
}

TEST_CASE("friedman is invariant under per-run monotone transforms") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rng() % 10, k = 2 + rng() % 4;
    Matrix values(n, k);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < k; ++c) values(r, c) = uniform_double(rng);
    std::vector<std::string> names(k, "m");
    for (std::size_t c = 0; c < k; ++c) names[c] += std::to_string(c);
    auto base = friedman(RunMatrix::checked(names, values));
    Matrix transformed(n, k);
    for (std::size_t r = 0; r < n; ++r) {
      const int kind = static_cast<int>(rng() % 3);
      const double scale = 1.0 + uniform_double(rng);
      for (std::size_t c = 0; c < k; ++c) {
        const double v = values(r, c);
        transformed(r, c) = kind == 0   ? scale * v + 3.0
                            : kind == 1 ? std::exp(v)
                                        : v * v * v;
      }
    }
    auto after = friedman(RunMatrix::checked(names, transformed));
    CHECK(after.chi2 == doctest::Approx(base.chi2).epsilon(1e-12));
  }
}

TEST_CASE("wilcoxon: thirty uniformly negative distinct differences") {
  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    y[i] = 1.0 + i;
    x[i] = y[i] - (0.5 + 0.01 * i);  // distinct magnitudes
  }
  auto r = wilcoxon_one_sided(x, y);
  CHECK(r.exact);
  CHECK(r.n_used == 30);
  CHECK(r.statistic.value() == 0.0);
  CHECK(std::abs(r.p_value.value() - std::ldexp(1.0, -30)) < 1e-12);
}

TEST_CASE("wilcoxon: thirty uniformly positive differences give W = 465, p = 1") {
  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    y[i] = 1.0 + i;
    x[i] = y[i] + (0.5 + 0.01 * i);
  }
  auto r = wilcoxon_one_sided(x, y);
  CHECK(r.statistic.value() == doctest::Approx(465.0));
  CHECK(r.p_value.value() == doctest::Approx(1.0));
}

TEST_CASE("wilcoxon: identical sequences are undefined") {
  std::vector<double> x{1, 2, 3, 4, 5, 6};
  auto r = wilcoxon_one_sided(x, x);
  CHECK(r.n_used == 0);
  CHECK_FALSE(r.statistic.has_value());
  CHECK_FALSE(r.p_value.has_value());
}

TEST_CASE("wilcoxon: fewer than five non-zero differences is a domain error") {
  std::vector<double> x{1, 2, 3, 4};
  std::vector<double> y{2, 3, 4, 5};
  CHECK_THROWS_AS(wilcoxon_one_sided(x, y), DomainError);
}

TEST_CASE("wilcoxon: tied magnitudes get average ranks") {
  // d = {-2, -2, +2, -5, -7}: |d| ranks are {2, 2, 2, 4, 5}
  std::vector<double> x{0, 0, 2, 0, 0};
  std::vector<double> y{2, 2, 0, 5, 7};
  auto r = wilcoxon_one_sided(x, y);
  CHECK(r.statistic.value() == doctest::Approx(2.0));
  CHECK(r.exact);
  CHECK(r.p_value.value() > 0.0);
  CHECK(r.p_value.value() < 0.5);
}

TEST_CASE("wilcoxon: W(x, y) and W(y, x) sum to n(n+1)/2 without zeros or ties") {
  std::mt19937_64 rng(33);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 6 + rng() % 15;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = uniform_double(rng);
      y[i] = uniform_double(rng);
    }
    auto a = wilcoxon_one_sided(x, y);
    auto b = wilcoxon_one_sided(y, x);
    const double total = static_cast<double>(n * (n + 1)) / 2.0;
    CHECK(a.statistic.value() + b.statistic.value() == doctest::Approx(total));
  }
}

TEST_CASE("wilcoxon: exact and normal routes agree loosely at n = 25") {
  std::mt19937_64 rng(37);
  std::vector<double> x(25), y(25);
  for (int i = 0; i < 25; ++i) {
    x[i] = uniform_double(rng);
    y[i] = x[i] + (uniform_double(rng) - 0.65);
  }
  auto exact = wilcoxon_one_sided(x, y);
  REQUIRE(exact.exact);
  // normal approximation of the same statistic
  const double n = 25.0;
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  const double z = (exact.statistic.value() - mean + 0.5) / std::sqrt(var);
  const double approx = 0.5 * std::erfc(-z / std::sqrt(2.0));
  CHECK(std::abs(exact.p_value.value() - approx) < 0.01);
}

TEST_CASE("holm: single p-value is unchanged") {
  auto adj = holm(std::vector<double>{0.03});
  CHECK(adj[0] == doctest::Approx(0.03));
}

TEST_CASE("holm: two p-values, hand case") {
  auto adj = holm(std::vector<double>{0.01, 0.04});
  CHECK(adj[0] == doctest::Approx(0.02));
  CHECK(adj[1] == doctest::Approx(0.04));
}

TEST_CASE("holm: clamps at one and preserves order") {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 1 + rng() % 8;
    std::vector<double> p(m);
    for (auto& v : p) v = uniform_double(rng);
    auto adj = holm(p);
    for (double v : adj) CHECK(v <= 1.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (p[i] < p[j]) CHECK(adj[i] <= adj[j] + 1e-15);
  }
  CHECK_THROWS_AS(holm(std::vector<double>{1.5}), DomainError);
}

TEST_CASE("cliffs_delta: symmetry, dominance, mixed") {
  std::vector<double> a{1, 2, 3};
  CHECK(cliffs_delta(a, a) == doctest::Approx(0.0));
  std::vector<double> lo{1, 2}, hi{3, 4};
  CHECK(cliffs_delta(lo, hi) == doctest::Approx(-1.0));
  std::vector<double> x{1, 3}, y{2};
  CHECK(cliffs_delta(x, y) == doctest::Approx(0.0));
}

TEST_CASE("cliffs_delta is antisymmetric") {
  std::mt19937_64 rng(47);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(1 + rng() % 10), y(1 + rng() % 10);
    for (auto& v : x) v = uniform_double(rng);
    for (auto& v : y) v = uniform_double(rng);
    CHECK(cliffs_delta(x, y) == doctest::Approx(-cliffs_delta(y, x)));
  }
}

TEST_CASE("median: odd, even, empty") {
  CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(median({}), DomainError);
}

TEST_CASE("run matrix validation") {
  CHECK_THROWS_AS(runs_of({"a"}, {{1.0}, {2.0}}), ValidationError);
  CHECK_THROWS_AS(runs_of({"a", "b"}, {{1.0, 2.0}}), ValidationError);
}
