#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "ucalib/csv.hpp"
#include "ucalib/data_model.hpp"
#include "ucalib/errors.hpp"
#include "ucalib/rng.hpp"

using namespace ucalib;

namespace {

Matrix rows(std::vector<std::vector<double>> r) { return Matrix::from_rows(r); }

PredictionStack stack_of(std::vector<std::vector<std::vector<double>>> passes) {
  std::vector<Matrix> ms;
  for (auto& p : passes) ms.push_back(rows(p));
  return PredictionStack::checked(std::move(ms));
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() /
             ("ucalib_dm_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("mean_over_passes: single pass is the identity") {
  auto stack = stack_of({{{0.3, 0.7}, {0.9, 0.1}}});
  auto mean = mean_over_passes(stack);
  CHECK(mean.at(0, 0) == 0.3);
  CHECK(mean.at(1, 1) == 0.1);
}

TEST_CASE("mean_over_passes: symmetric two-pass average") {
  auto stack = stack_of({{{1.0, 0.0}}, {{0.0, 1.0}}});
  auto mean = mean_over_passes(stack);
  CHECK(mean.at(0, 0) == doctest::Approx(0.5));
  CHECK(mean.at(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("mean_over_passes: three passes against an independent summation") {
  auto stack = stack_of({{{0.9, 0.1}}, {{0.6, 0.4}}, {{0.3, 0.7}}});
  auto mean = mean_over_passes(stack);
  // Independent route: long double accumulation in pass order.
  long double s0 = 0.0L, s1 = 0.0L;
  for (std::size_t t = 0; t < stack.passes(); ++t) {
    s0 += stack.pass(t)(0, 0);
    s1 += stack.pass(t)(0, 1);
  }
  CHECK(mean.at(0, 0) == doctest::Approx(static_cast<double>(s0 / 3.0L)).epsilon(1e-15));
  CHECK(mean.at(0, 1) == doctest::Approx(static_cast<double>(s1 / 3.0L)).epsilon(1e-15));
  CHECK(mean.at(0, 0) == doctest::Approx(0.6));
  CHECK(mean.at(0, 1) == doctest::Approx(0.4));
}

TEST_CASE("mean_over_passes keeps rows stochastic for random valid stacks") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t t = 1 + rng() % 5, n = 1 + rng() % 8, c = 2 + rng() % 6;
    std::vector<Matrix> passes;
    for (std::size_t ti = 0; ti < t; ++ti) {
      Matrix m(n, c);
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
          m(i, j) = uniform_double(rng) + 1e-3;
          sum += m(i, j);
        }
        for (std::size_t j = 0; j < c; ++j) m(i, j) /= sum;
      }
      passes.push_back(std::move(m));
    }
    auto mean = mean_over_passes(PredictionStack::checked(std::move(passes)));
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (double v : mean.row(i)) sum += v;
      CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("stack validation names the offending pass and sample") {
  std::vector<Matrix> passes;
  passes.push_back(rows({{0.5, 0.5}, {0.9, 0.3}}));  // sample 1 sums to 1.2
  try {
    PredictionStack::checked(std::move(passes));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("pass 0") != std::string::npos);
    CHECK(msg.find("sample 1") != std::string::npos);
  }
}

TEST_CASE("normalized_entropy: one-hot, uniform, half-half") {
  CHECK(normalized_entropy(std::vector<double>{1.0, 0.0, 0.0}) == 0.0);
  for (std::size_t c : {2, 3, 10}) {
    std::vector<double> u(c, 1.0 / static_cast<double>(c));
    CHECK(normalized_entropy(u) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(normalized_entropy(std::vector<double>{0.5, 0.5, 0.0, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("normalized_entropy rejects fewer than two classes") {
  CHECK_THROWS_AS(normalized_entropy(std::vector<double>{1.0}), DomainError);
}

TEST_CASE("normalized_entropy: permutation invariant, maximized by uniform") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t c = 2 + rng() % 8;
    std::vector<double> row(c);
    double sum = 0.0;
    for (auto& v : row) {
      v = uniform_double(rng) + 1e-6;
      sum += v;
    }
    for (auto& v : row) v /= sum;
    const double h = normalized_entropy(row);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
    auto shuffled = row;
    for (std::size_t i = c - 1; i > 0; --i)
      std::swap(shuffled[i], shuffled[uniform_below(rng, i + 1)]);
    CHECK(normalized_entropy(shuffled) == doctest::Approx(h).epsilon(1e-12));
    // strictly below the uniform maximum unless the row is uniform
    double dev = 0.0;
    for (double v : row) dev = std::max(dev, std::abs(v - 1.0 / c));
    if (dev > 1e-4) CHECK(h < 1.0);
  }
}

TEST_CASE("renormalize: scaling, identity, degenerate row") {
  auto m = renormalize(rows({{0.2, 0.2}}));
  CHECK(m.at(0, 0) == doctest::Approx(0.5));

  auto already = rows({{0.25, 0.75}});
  auto out = renormalize(already);
  CHECK(out.at(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(out.at(0, 1) == doctest::Approx(0.75).epsilon(1e-12));

  auto zero = renormalize(rows({{0.0, 0.0, 0.0}}));
  for (std::size_t c = 0; c < 3; ++c)
    CHECK(zero.at(0, c) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("renormalize rejects negative entries") {
  CHECK_THROWS_AS(renormalize(rows({{0.5, -0.1}})), DomainError);
}

TEST_CASE("renormalize is idempotent") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng() % 5, c = 2 + rng() % 6;
    Matrix m(n, c);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform_double(rng) * 3.0;
    auto once = renormalize(m);
    auto twice = renormalize(once.values());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c; ++j)
        CHECK(std::abs(once.at(i, j) - twice.at(i, j)) <= 1e-12);
  }
}

TEST_CASE("make_split: floor sizes with remainder to train") {
  SplitSpec spec;
  spec.seed = 42;
  auto s = make_split(20, spec);
  CHECK(s.train.size() == 11);
  CHECK(s.conformal.size() == 3);
  CHECK(s.calibration.size() == 3);
  CHECK(s.test.size() == 3);
}

TEST_CASE("make_split: four samples, quarter fractions") {
  SplitSpec spec{0.25, 0.25, 0.25, 0.25, 9};
  auto s = make_split(4, spec);
  CHECK(s.train.size() == 1);
  CHECK(s.conformal.size() == 1);
  CHECK(s.calibration.size() == 1);
  CHECK(s.test.size() == 1);
}

TEST_CASE("make_split is deterministic under the seed") {
  SplitSpec spec;
  spec.seed = 77;
  auto a = make_split(57, spec);
  auto b = make_split(57, spec);
  CHECK(a.train == b.train);
  CHECK(a.conformal == b.conformal);
  CHECK(a.calibration == b.calibration);
  CHECK(a.test == b.test);
}

TEST_CASE("make_split partitions are disjoint and exhaustive") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 8 + rng() % 200;
    SplitSpec spec;
    spec.seed = rng();
    auto s = make_split(n, spec);
    std::vector<bool> seen(n, false);
    for (const auto* part : {&s.train, &s.conformal, &s.calibration, &s.test}) {
      for (std::size_t i : *part) {
        REQUIRE(i < n);
        REQUIRE(!seen[i]);
        seen[i] = true;
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  }
}

TEST_CASE("make_split rejects empty subsets and tiny n") {
  SplitSpec spec{0.97, 0.01, 0.01, 0.01, 1};
  CHECK_THROWS_AS(make_split(5, spec), ConfigError);
  SplitSpec ok;
  CHECK_THROWS_AS(make_split(3, ok), DomainError);
  SplitSpec bad_sum{0.5, 0.2, 0.2, 0.2, 1};
  CHECK_THROWS_AS(make_split(100, bad_sum), ConfigError);
}

TEST_CASE("csv: probability matrix round-trips bitwise") {
  auto dir = temp_dir();
  std::mt19937_64 rng(3);
  Matrix m(17, 4);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      m(i, c) = uniform_double(rng) + 1e-9;
      sum += m(i, c);
    }
    for (std::size_t c = 0; c < 4; ++c) m(i, c) /= sum;
  }
  auto probs = ProbMatrix::checked(std::move(m));
  write_prob_matrix(dir / "probs.csv", probs);
  auto back = read_prob_matrix(dir / "probs.csv");
  REQUIRE(back.samples() == probs.samples());
  for (std::size_t i = 0; i < probs.samples(); ++i)
    for (std::size_t c = 0; c < probs.classes(); ++c)
      CHECK(back.at(i, c) == probs.at(i, c));  // exact, not approximate
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv: short row reports its location") {
  auto dir = temp_dir();
  {
    std::ofstream out(dir / "probs.csv");
    out << "c0,c1,c2,c3\n0.25,0.25,0.25,0.25\n0.5,0.25,0.25\n";
  }
  try {
    read_prob_matrix(dir / "probs.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv: label equal to the class count is rejected") {
  auto dir = temp_dir();
  {
    std::ofstream out(dir / "labels.csv");
    out << "label\n0\n4\n";
  }
  CHECK_THROWS_AS(read_labels(dir / "labels.csv", 4), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv: missing file raises a parse error") {
  CHECK_THROWS_AS(read_prob_matrix("/nonexistent/probs.csv"), ParseError);
}

TEST_CASE("csv: stacks round-trip through a directory") {
  auto dir = temp_dir();
  auto stack = stack_of({{{0.25, 0.75}, {0.5, 0.5}}, {{0.125, 0.875}, {1.0, 0.0}}});
  write_stack(dir, stack);
  auto back = read_stack(dir);
  REQUIRE(back.passes() == 2);
  CHECK(back.pass(1)(0, 1) == 0.875);
  std::filesystem::remove_all(dir);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax_row(std::vector<double>{0.4, 0.4, 0.2}) == 0);
  CHECK(argmax_row(std::vector<double>{0.1, 0.6, 0.3}) == 1);
}
