#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kpod/data.hpp"
#include "kpod/errors.hpp"
#include "kpod/rng.hpp"
#include "kpod/search.hpp"

using namespace kpod;

namespace {

TrainConfig base_config() {
  TrainConfig c;
  c.kernel.sigma = 1.0;
  return c;
}

}  // namespace

TEST_CASE("auto_sigma_grid is a symmetric power-of-two ladder") {
  const auto data = gen2d(Gen2dCase::connected, 40, 0.6, 3);
  const auto grid = auto_sigma_grid(data, 3);
  REQUIRE(grid.size() == 7);
  for (std::size_t i = 1; i < grid.size(); ++i)
    CHECK(grid[i] == doctest::Approx(2.0 * grid[i - 1]).epsilon(1e-12));
  CHECK(grid[3] > 0.1);  // sigma0 for this data sits near unit scale
  CHECK(grid[3] < 10.0);
}

TEST_CASE("grid_search finds a sensible sigma on the spiral") {
  const auto data = gen2d(Gen2dCase::spiral, 60, 0.02, 9);
  SearchSpec spec;
  spec.sigmas = {0.4, 51.2};  // a width far beyond the data diameter cannot separate the arms
  spec.folds = 3;
  spec.seed = 1;
  const SearchResult res = grid_search(data, base_config(), spec);
  REQUIRE(res.evaluated.size() == 2);
  CHECK(res.best.sigma == 0.4);
  CHECK(res.best.cv_accuracy > 0.9);
  CHECK(res.evaluated[1].cv_accuracy < res.best.cv_accuracy);
  // deterministic repeat
  const SearchResult again = grid_search(data, base_config(), spec);
  for (std::size_t i = 0; i < res.evaluated.size(); ++i)
    CHECK(res.evaluated[i].cv_accuracy == again.evaluated[i].cv_accuracy);
}

TEST_CASE("grid_search covers the energy axis when asked") {
  const auto data = gen2d(Gen2dCase::connected, 30, 0.6, 5);
  SearchSpec spec;
  spec.sigmas = {1.2};
  spec.energies = {0.9, 0.999};
  spec.folds = 3;
  const SearchResult res = grid_search(data, base_config(), spec);
  REQUIRE(res.evaluated.size() == 2);
  CHECK(res.evaluated[0].energy == 0.9);
  CHECK(res.evaluated[1].energy == 0.999);
}

TEST_CASE("grid_search: ties keep the earlier grid point") {
  // two identical sigma candidates necessarily tie
  const auto data = gen2d(Gen2dCase::nonconnected, 24, 0.6, 8);
  SearchSpec spec;
  spec.sigmas = {1.2, 1.2};
  spec.folds = 3;
  const SearchResult res = grid_search(data, base_config(), spec);
  CHECK(res.evaluated[0].cv_accuracy == res.evaluated[1].cv_accuracy);
  CHECK(res.best.sigma == res.evaluated[0].sigma);
}

TEST_CASE("grid_search respects the per-class cap") {
  const auto data = gen2d(Gen2dCase::connected, 50, 0.6, 4);
  SearchSpec spec;
  spec.sigmas = {1.2};
  spec.folds = 5;
  spec.per_class_cap = 10;
  // 10 per class spread over 5 folds: each CV model trains on 16 samples
  const SearchResult res = grid_search(data, base_config(), spec);
  CHECK(res.best.cv_accuracy >= 0.0);
  CHECK(res.best.cv_accuracy <= 1.0);
}

TEST_CASE("grid_search input validation") {
  const auto data = gen2d(Gen2dCase::connected, 20, 0.6, 2);
  SearchSpec spec;
  spec.sigmas = {1.0};
  spec.folds = 1;
  CHECK_THROWS_AS(grid_search(data, base_config(), spec), input_error);
  spec.folds = 5;
  spec.sigmas.clear();
  CHECK_THROWS_AS(grid_search(data, base_config(), spec), input_error);

  // a 1-sample class cannot be cross-validated
  std::vector<Sample> tiny{{"a", {{1, 0.0}}}, {"b", {{1, 5.0}}}, {"b", {{1, 6.0}}}};
  spec.sigmas = {1.0};
  CHECK_THROWS_AS(grid_search(tiny, base_config(), spec), input_error);
}

TEST_CASE("end-to-end pipeline: search, final train, evaluate") {
  SUBCASE("sparse high-dimensional two-class data, raw features") {
    // same shape as a gene-expression benchmark: few samples, many features
    SplitMix64 rng(101);
    std::vector<Sample> trainset, testset;
    auto make = [&](const char* label, double shift, int count, std::vector<Sample>& dst) {
      for (int i = 0; i < count; ++i) {
        Sample s;
        s.label = label;
        for (int f = 1; f <= 500; ++f)
          if (rng.uniform() < 0.2) s.features.emplace_back(f, shift + rng.gaussian());
        dst.push_back(std::move(s));
      }
    };
    make("-1", 0.0, 25, trainset);
    make("+1", 1.5, 12, trainset);
    make("-1", 0.0, 15, testset);
    make("+1", 1.5, 15, testset);

    TrainConfig base;
    SearchSpec spec;
    spec.sigmas = auto_sigma_grid(trainset, 3);
    spec.folds = 5;
    const SearchResult res = grid_search(trainset, base, spec);
    CHECK(res.best.cv_accuracy > 0.8);

    TrainConfig best = base;
    best.kernel.sigma = res.best.sigma;
    const Classifier c = train(trainset, best);
    const Metrics m = evaluate(c, testset);
    CHECK(m.accuracy >= 0.9);
  }
  SUBCASE("low-dimensional data with minmax01 scaling and a search cap") {
    std::vector<Sample> raw = gen2d(Gen2dCase::nonconnected, 150, 0.6, 55);
    for (auto& s : raw)  // push features off unit scale so scaling matters
      for (auto& [idx, val] : s.features) val = 40.0 * val + 100.0;
    std::vector<Sample> testraw = gen2d(Gen2dCase::nonconnected, 100, 0.6, 56);
    for (auto& s : testraw)
      for (auto& [idx, val] : s.features) val = 40.0 * val + 100.0;

    const ScalingParams sp = fit_scaling(raw, ScalingMode::minmax01);
    const auto trainset = apply_scaling(sp, raw);
    const auto testset = apply_scaling(sp, testraw);

    TrainConfig base;
    SearchSpec spec;
    spec.sigmas = auto_sigma_grid(trainset, 2);
    spec.folds = 5;
    spec.per_class_cap = 60;
    const SearchResult res = grid_search(trainset, base, spec);

    TrainConfig best = base;
    best.kernel.sigma = res.best.sigma;
    const Classifier c = train(trainset, best);
    CHECK(evaluate(c, testset).accuracy >= 0.9);
  }
}
