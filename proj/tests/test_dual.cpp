#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ucalib/data_model.hpp"
#include "ucalib/dual.hpp"
#include "ucalib/errors.hpp"
#include "ucalib/rng.hpp"

using namespace ucalib;

namespace {

// Two tight clusters at x = -10 and x = +10 with confident correct pool
// predictions (nonconformity 0.1 everywhere), plus an ambiguous middle.
struct Fixture {
  NeighborIndex index;
  ProbMatrix cal_probs;
  LabelVector cal_labels;
  StratificationFlags cal_flags;
  ConformalConfig config{2, 0.1};
};

Fixture make_fixture() {
  Matrix pool_f(4, 1);
  pool_f(0, 0) = -10.0;
  pool_f(1, 0) = -10.0;
  pool_f(2, 0) = 10.0;
  pool_f(3, 0) = 10.0;
  auto pool_probs = ProbMatrix::checked(Matrix::from_rows(
      {{0.9, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.1, 0.9}}));
  auto index = NeighborIndex::build(FeatureMatrix::checked(std::move(pool_f)),
                                    LabelVector::checked({0, 0, 1, 1}, 2), pool_probs);

  // calibration: two confident points per cluster and two ambiguous ones
  Matrix cal_f(6, 1);
  cal_f(0, 0) = -10.0;
  cal_f(1, 0) = -10.0;
  cal_f(2, 0) = 10.0;
  cal_f(3, 0) = 10.0;
  cal_f(4, 0) = 0.0;
  cal_f(5, 0) = 0.0;
  auto cal_probs = ProbMatrix::checked(Matrix::from_rows({{0.95, 0.05},
                                                          {0.93, 0.07},
                                                          {0.05, 0.95},
                                                          {0.07, 0.93},
                                                          {0.55, 0.45},
                                                          {0.45, 0.55}}));
  auto cal_labels = LabelVector::checked({0, 0, 1, 1, 0, 1}, 2);
  ConformalConfig config{2, 0.1};
  auto cal_flags = stratify(index, FeatureMatrix::checked(std::move(cal_f)), cal_probs,
                            argmax_labels(cal_probs), config);
  return Fixture{std::move(index), std::move(cal_probs), std::move(cal_labels),
                 std::move(cal_flags), config};
}

}  // namespace

TEST_CASE("fixture stratification separates confident and ambiguous rows") {
  auto fx = make_fixture();
  CHECK(fx.cal_flags.flags == std::vector<bool>{true, true, true, true, false, false});
}

TEST_CASE("fit_dual: groups are fitted exactly like direct per-group fits") {
  auto fx = make_fixture();
  auto dual = fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, 0.8, fx.config);
  CHECK(dual.warnings().empty());
  CHECK(dual.beta() == 0.8);

  std::vector<std::size_t> correct{0, 1, 2, 3}, incorrect{4, 5};
  auto expect_std =
      fit_standard(gather_rows(fx.cal_probs, correct), gather_rows(fx.cal_labels, correct));
  auto expect_und = fit_underconfident(gather_rows(fx.cal_probs, incorrect), 0.8);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(dual.standard().model(c).block_values() == expect_std.model(c).block_values());
    CHECK(dual.underconfident().model(c).block_values() ==
          expect_und.model(c).block_values());
  }
}

TEST_CASE("fit_dual: empty putatively-incorrect group falls back with a warning") {
  auto fx = make_fixture();
  StratificationFlags all_true = fx.cal_flags;
  all_true.flags.assign(all_true.flags.size(), true);
  auto dual = fit_dual(fx.cal_probs, fx.cal_labels, all_true, 0.9, fx.config);
  REQUIRE(dual.warnings().size() == 1);
  CHECK(dual.warnings()[0].find("empty") != std::string::npos);
  auto expect = fit_underconfident(fx.cal_probs, 0.9);
  for (std::size_t c = 0; c < 2; ++c)
    CHECK(dual.underconfident().model(c).block_values() ==
          expect.model(c).block_values());
}

TEST_CASE("fit_dual: empty putatively-correct group is a configuration error") {
  auto fx = make_fixture();
  StratificationFlags none = fx.cal_flags;
  none.flags.assign(none.flags.size(), false);
  CHECK_THROWS_AS(fit_dual(fx.cal_probs, fx.cal_labels, none, 0.9, fx.config),
                  ConfigError);
}

TEST_CASE("fit_dual validates beta and sizes") {
  auto fx = make_fixture();
  CHECK_THROWS_AS(fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, 1.5, fx.config),
                  DomainError);
  StratificationFlags short_flags = fx.cal_flags;
  short_flags.flags.pop_back();
  CHECK_THROWS_AS(fit_dual(fx.cal_probs, fx.cal_labels, short_flags, 0.9, fx.config),
                  DomainError);
}

TEST_CASE("apply: all-true flags reproduce the standard calibrator") {
  auto fx = make_fixture();
  auto dual = fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, 0.9, fx.config);
  StratificationFlags all_true = fx.cal_flags;
  all_true.flags.assign(all_true.flags.size(), true);
  auto via_dual = dual.apply(fx.cal_probs, all_true);
  auto via_std = dual.standard().apply(fx.cal_probs);
  for (std::size_t i = 0; i < via_dual.samples(); ++i)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(via_dual.at(i, c) == via_std.at(i, c));
}

TEST_CASE("apply: beta = 0 sends flagged-incorrect rows to uniform") {
  auto fx = make_fixture();
  auto dual = fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, 0.0, fx.config);
  auto out = dual.apply(fx.cal_probs, fx.cal_flags);
  CHECK(out.at(4, 0) == doctest::Approx(0.5));
  CHECK(out.at(4, 1) == doctest::Approx(0.5));
  CHECK(out.at(5, 0) == doctest::Approx(0.5));
}

TEST_CASE("apply: rows are routed independently (permutation equivariance)") {
  auto fx = make_fixture();
  auto dual = fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, 0.7, fx.config);
  auto base = dual.apply(fx.cal_probs, fx.cal_flags);

  std::vector<std::size_t> perm{5, 3, 1, 0, 2, 4};
  auto perm_probs = gather_rows(fx.cal_probs, perm);
  StratificationFlags perm_flags;
  for (std::size_t i : perm) {
    perm_flags.flags.push_back(fx.cal_flags.flags[i]);
    perm_flags.set_sizes.push_back(fx.cal_flags.set_sizes[i]);
    perm_flags.quantiles.push_back(fx.cal_flags.quantiles[i]);
  }
  auto permuted = dual.apply(perm_probs, perm_flags);
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(permuted.at(i, c) == base.at(perm[i], c));
}

TEST_CASE("apply: flipping a flag changes only that row") {
  auto fx = make_fixture();
  auto dual = fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, 0.6, fx.config);
  auto base = dual.apply(fx.cal_probs, fx.cal_flags);
  StratificationFlags flipped = fx.cal_flags;
  flipped.flags[4] = !flipped.flags[4];
  auto changed = dual.apply(fx.cal_probs, flipped);
  for (std::size_t i = 0; i < base.samples(); ++i) {
    if (i == 4) continue;
    for (std::size_t c = 0; c < 2; ++c) CHECK(changed.at(i, c) == base.at(i, c));
  }
}

TEST_CASE("infer: T=1 with all-true flags equals the standard calibrator") {
  auto fx = make_fixture();
  auto dual = fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, 0.9, fx.config);

  // confident test points inside the clusters: singleton sets matching argmax
  Matrix test_f(2, 1);
  test_f(0, 0) = -10.0;
  test_f(1, 0) = 10.0;
  auto raw = ProbMatrix::checked(Matrix::from_rows({{0.95, 0.05}, {0.05, 0.95}}));
  Matrix pass = raw.values();
  auto stack = PredictionStack::checked({std::move(pass)});

  auto out = dual.infer(fx.index, FeatureMatrix::checked(std::move(test_f)), stack);
  CHECK(out.flags.flags == std::vector<bool>{true, true});
  auto expect = dual.standard().apply(raw);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(out.calibrated.at(i, c) == expect.at(i, c));
  CHECK(out.entropies[0] == doctest::Approx(normalized_entropy(expect.row(0))));
}

TEST_CASE("infer: predicted labels always equal the pre-calibration argmax") {
  auto fx = make_fixture();
  std::mt19937_64 rng(71);
  for (double beta : {0.0, 0.3, 0.9}) {
    auto dual = fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, beta, fx.config);
    const std::size_t n = 40, t = 3;
    Matrix feats(n, 1);
    std::vector<Matrix> passes(t, Matrix(n, 2));
    for (std::size_t i = 0; i < n; ++i) {
      feats(i, 0) = uniform_double(rng) * 24.0 - 12.0;
      for (std::size_t ti = 0; ti < t; ++ti) {
        const double p = uniform_double(rng);
        passes[ti](i, 0) = p;
        passes[ti](i, 1) = 1.0 - p;
      }
    }
    auto stack = PredictionStack::checked(std::move(passes));
    auto features = FeatureMatrix::checked(std::move(feats));
    auto out = dual.infer(fx.index, features, stack);
    auto expected = argmax_labels(mean_over_passes(stack));
    for (std::size_t i = 0; i < n; ++i) CHECK(out.predicted_labels[i] == expected[i]);
  }
}

TEST_CASE("dual calibrator JSON round-trips") {
  auto fx = make_fixture();
  auto dual = fit_dual(fx.cal_probs, fx.cal_labels, fx.cal_flags, 0.42, fx.config);
  auto back = DualCalibrator::from_json_string(dual.to_json_string());
  CHECK(back.beta() == 0.42);
  CHECK(back.config().k == fx.config.k);
  CHECK(back.config().alpha == fx.config.alpha);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(back.standard().model(c).block_values() ==
          dual.standard().model(c).block_values());
    CHECK(back.underconfident().model(c).block_values() ==
          dual.underconfident().model(c).block_values());
  }
}
