#include <doctest.h>

#include <cmath>

#include "kpod/classifier.hpp"
#include "kpod/data.hpp"
#include "kpod/errors.hpp"
#include "kpod/rng.hpp"

using namespace kpod;

namespace {

SparseVec sv(std::initializer_list<double> dense) {
  return to_sparse(std::vector<double>(dense));
}

Sample samp(const char* label, std::initializer_list<double> dense) {
  return Sample{label, sv(dense)};
}

TrainConfig rbf_config(double energy = 0.999) {
  TrainConfig c;
  c.kernel.sigma = 1.2;
  c.policy.energy_threshold = energy;
  return c;
}

std::vector<SparseVec> numbered(int n) {
  // distinct, well-separated 1-d points
  std::vector<SparseVec> out;
  for (int i = 0; i < n; ++i) out.push_back(sv({double(i)}));
  return out;
}

std::vector<Sample> blobs(int classes, int per_class, std::uint64_t seed, double spread = 4.0) {
  SplitMix64 rng(seed);
  std::vector<Sample> out;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      Sample s;
      s.label = std::to_string(c + 1);
      s.features = {{1, spread * c + 0.5 * rng.gaussian()}, {2, 0.5 * rng.gaussian()}};
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("split_class") {
  SUBCASE("below the threshold: one subset") {
    const auto subs = split_class(numbered(10), 10);
    REQUIRE(subs.size() == 1);
    CHECK(subs[0].size() == 10);
  }
  SUBCASE("exactly double: two equal subsets") {
    const auto subs = split_class(numbered(20), 10);
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].size() == 10);
    CHECK(subs[1].size() == 10);
  }
  SUBCASE("round-half-to-even: 25/10 -> q=2, sizes 13+12") {
    const auto subs = split_class(numbered(25), 10);
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].size() == 13);
    CHECK(subs[1].size() == 12);
  }
  SUBCASE("leukemia-shaped 27/11 -> 2 subsets of 14 and 13") {
    const auto subs = split_class(numbered(27), 11);
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].size() == 14);
    CHECK(subs[1].size() == 13);
  }
  SUBCASE("100/10 -> 10 subsets of 10") {
    const auto subs = split_class(numbered(100), 10);
    REQUIRE(subs.size() == 10);
    for (const auto& s : subs) CHECK(s.size() == 10);
  }
  SUBCASE("round robin keeps input order: subset k takes k, k+q, ...") {
    const auto subs = split_class(numbered(6), 3);
    REQUIRE(subs.size() == 2);
    CHECK(subs[0][0] == sv({0.0}));
    CHECK(subs[0][1] == sv({2.0}));
    CHECK(subs[1][0] == sv({1.0}));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(split_class({}, 5), input_error);
    CHECK_THROWS_AS(split_class(numbered(5), 0), input_error);
  }
  SUBCASE("subset sizes differ by at most one (property)") {
    SplitMix64 rng(9);
    for (int rep = 0; rep < 50; ++rep) {
      const int ref = 1 + int(rng.next() % 12);
      const int n = ref * 2 + int(rng.next() % 90);
      const auto subs = split_class(numbered(n), ref);
      std::size_t lo = subs[0].size(), hi = subs[0].size(), total = 0;
      for (const auto& s : subs) {
        lo = std::min(lo, s.size());
        hi = std::max(hi, s.size());
        total += s.size();
      }
      CHECK(hi - lo <= 1);
      CHECK(total == std::size_t(n));
    }
  }
}

TEST_CASE("train: two single-sample classes") {
  const std::vector<Sample> data{samp("a", {0, 0}), samp("b", {5, 5})};
  const Classifier c = train(data, rbf_config());
  CHECK(c.labels == std::vector<std::string>{"a", "b"});
  CHECK(c.subspaces.size() == 2);
  CHECK(c.subspaces[0].mode_count() == 1);
  CHECK(c.subspaces[1].mode_count() == 1);
}

TEST_CASE("train requires two distinct labels and propagates fit errors") {
  CHECK_THROWS_AS(train({samp("a", {1})}, rbf_config()), input_error);
  CHECK_THROWS_AS(train({samp("a", {1}), samp("a", {2})}, rbf_config()), input_error);

  // centered single-sample class degenerates; the error names it
  TrainConfig cfg = rbf_config();
  cfg.centered = true;
  CHECK_THROWS_WITH_AS(train({samp("lonely", {1}), samp("b", {2}), samp("b", {3})}, cfg),
                       doctest::Contains("lonely"), degenerate_error);
}

TEST_CASE("train with balance: leukemia-shaped 27/11 gives 3 subspaces") {
  SplitMix64 rng(2);
  std::vector<Sample> data;
  for (int i = 0; i < 27; ++i)
    data.push_back(samp("t", {rng.gaussian(), rng.gaussian()}));
  for (int i = 0; i < 11; ++i)
    data.push_back(samp("u", {6 + rng.gaussian(), rng.gaussian()}));

  TrainConfig cfg = rbf_config();
  cfg.balance = true;
  const Classifier c = train(data, cfg);
  REQUIRE(c.subspaces.size() == 3);
  CHECK(c.subspaces[0].class_label == "t");
  CHECK(c.subspaces[0].subset_index == 0);
  CHECK(c.subspaces[0].sample_count() == 14);
  CHECK(c.subspaces[1].class_label == "t");
  CHECK(c.subspaces[1].subset_index == 1);
  CHECK(c.subspaces[1].sample_count() == 13);
  CHECK(c.subspaces[2].class_label == "u");
  CHECK(c.subspaces[2].sample_count() == 11);
}

TEST_CASE("predict") {
  SUBCASE("training sample returns its own class with zero distance") {
    const std::vector<Sample> data{samp("a", {0, 0}), samp("a", {1, 0}), samp("b", {6, 0}),
                                   samp("b", {7, 0})};
    const Classifier c = train(data, rbf_config(1.0));
    const Prediction p = predict(c, sv({1, 0}));
    CHECK(p.label == "a");
    CHECK(p.class_distances[0] <= 1e-6);
    CHECK(p.class_distances[1] > 0.1);
  }
  SUBCASE("two single-sample classes under the linear kernel") {
    TrainConfig cfg;
    cfg.kernel.family = KernelFamily::linear;
    const Classifier c = train({samp("a", {1, 0}), samp("b", {0, 1})}, cfg);
    const Prediction p = predict(c, sv({1, 0.1}));
    CHECK(p.label == "a");
    // explicit geometry: distance to span{(1,0)} is 0.1, to span{(0,1)} is 1
    CHECK(p.class_distances[0] == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(p.class_distances[1] == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("exact tie breaks toward the earlier label") {
    TrainConfig cfg;
    cfg.kernel.family = KernelFamily::linear;
    const Classifier c = train({samp("a", {1, 0}), samp("b", {0, 1})}, cfg);
    const Prediction p = predict(c, sv({1, 1}));
    CHECK(p.class_distances[0] == p.class_distances[1]);
    CHECK(p.label == "a");
  }
  SUBCASE("repeated predictions are identical") {
    const std::vector<Sample> data = blobs(3, 20, 5);
    const Classifier c = train(data, rbf_config());
    const auto q = sv({1.7, -0.3});
    const Prediction p1 = predict(c, q);
    const Prediction p2 = predict(c, q);
    CHECK(p1.label == p2.label);
    CHECK(p1.subspace_distances == p2.subspace_distances);
    CHECK(p1.class_distances == p2.class_distances);
  }
}

TEST_CASE("predict_batch matches the serial reference exactly") {
  const std::vector<Sample> data = blobs(3, 30, 8);
  const Classifier c = train(data, rbf_config());
  SplitMix64 rng(77);
  std::vector<SparseVec> queries;
  for (int i = 0; i < 200; ++i)
    queries.push_back(sv({rng.uniform(-2.0, 10.0), rng.uniform(-2.0, 2.0)}));
  const auto par = predict_batch(c, queries);
  const auto ser = predict_batch_serial(c, queries);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].label == ser[i].label);
    CHECK(par[i].subspace_distances == ser[i].subspace_distances);
  }
}

TEST_CASE("add_class") {
  const std::vector<Sample> ab = blobs(2, 15, 3);
  const std::vector<Sample> abc = [&] {
    auto v = ab;
    auto extra = blobs(3, 15, 3);
    for (const auto& s : extra)
      if (s.label == "3") v.push_back(s);
    return v;
  }();

  const TrainConfig cfg = rbf_config();
  const Classifier two = train(ab, cfg);

  std::vector<SparseVec> third;
  for (const auto& s : abc)
    if (s.label == "3") third.push_back(s.features);

  SUBCASE("composition equals batch training with balance off") {
    const Classifier grown = add_class(two, "3", third);
    const Classifier batch = train(abc, cfg);
    REQUIRE(grown.labels == batch.labels);
    REQUIRE(grown.subspaces.size() == batch.subspaces.size());

    SplitMix64 rng(12);
    for (int i = 0; i < 300; ++i) {
      const auto q = sv({rng.uniform(-3.0, 12.0), rng.uniform(-3.0, 3.0)});
      const Prediction pg = predict(grown, q);
      const Prediction pb = predict(batch, q);
      CHECK(pg.label == pb.label);
      CHECK(pg.class_distances == pb.class_distances);
    }
  }
  SUBCASE("existing subspace objects are reused unmodified") {
    const Classifier grown = add_class(two, "3", third);
    for (std::size_t i = 0; i < two.subspaces.size(); ++i) {
      const auto& before = two.subspaces[i];
      const auto& after = grown.subspaces[i];  // "3" sorts after "1","2"
      CHECK(before.coeffs.a == after.coeffs.a);
      CHECK(before.eigenvalues == after.eigenvalues);
      CHECK(before.samples == after.samples);
    }
  }
  SUBCASE("predictions far from the new class are unchanged") {
    const Classifier grown = add_class(two, "3", third);
    const auto q = sv({0.2, 0.1});
    CHECK(predict(two, q).label == predict(grown, q).label);
  }
  SUBCASE("add then remove returns to the original behavior") {
    const Classifier grown = add_class(two, "3", third);
    const Classifier back = remove_class(grown, "3");
    SplitMix64 rng(13);
    for (int i = 0; i < 100; ++i) {
      const auto q = sv({rng.uniform(-3.0, 12.0), rng.uniform(-3.0, 3.0)});
      CHECK(predict(back, q).class_distances == predict(two, q).class_distances);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(add_class(two, "1", third), input_error);
    CHECK_THROWS_AS(add_class(two, "9", {}), input_error);
  }
}

TEST_CASE("remove_class") {
  const std::vector<Sample> abc = blobs(3, 12, 6);
  const Classifier three = train(abc, rbf_config());

  SUBCASE("dropping a class leaves the others untouched") {
    const Classifier two = remove_class(three, "3");
    CHECK(two.labels == std::vector<std::string>{"1", "2"});
    std::vector<Sample> ab;
    for (const auto& s : abc)
      if (s.label != "3") ab.push_back(s);
    const Classifier direct = train(ab, rbf_config());
    SplitMix64 rng(19);
    for (int i = 0; i < 100; ++i) {
      const auto q = sv({rng.uniform(-3.0, 12.0), rng.uniform(-3.0, 3.0)});
      CHECK(predict(two, q).class_distances == predict(direct, q).class_distances);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(remove_class(three, "zzz"), input_error);
    const Classifier two = remove_class(three, "3");
    CHECK_THROWS_AS(remove_class(two, "1"), input_error);
  }
}

TEST_CASE("evaluate") {
  const std::vector<Sample> data = blobs(2, 25, 10);
  const Classifier c = train(data, rbf_config(1.0));

  SUBCASE("training samples evaluate to perfect accuracy") {
    const Metrics m = evaluate(c, data);
    CHECK(m.accuracy == 1.0);
    CHECK(m.confusion[0][1] == 0);
    CHECK(m.confusion[1][0] == 0);
    CHECK(m.recall[0] == 1.0);
    CHECK(m.recall[1] == 1.0);
  }
  SUBCASE("confusion matrix counts line up") {
    std::vector<Sample> test = blobs(2, 40, 11);
    const Metrics m = evaluate(c, test);
    int total = 0, diag = 0;
    for (std::size_t i = 0; i < m.labels.size(); ++i)
      for (std::size_t j = 0; j < m.labels.size(); ++j) {
        total += m.confusion[i][j];
        if (i == j) diag += m.confusion[i][j];
      }
    CHECK(total == 80);
    CHECK(m.accuracy == doctest::Approx(double(diag) / 80));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(evaluate(c, {}), input_error);
    CHECK_THROWS_AS(evaluate(c, {samp("unknown", {0, 0})}), input_error);
  }
}

TEST_CASE("balance: split-class training samples classify home with near-zero distance") {
  SplitMix64 rng(30);
  std::vector<Sample> data;
  for (int i = 0; i < 60; ++i)
    data.push_back(samp("big", {3.0 * rng.gaussian(), 3.0 * rng.gaussian()}));
  for (int i = 0; i < 10; ++i)
    data.push_back(samp("small", {12 + 0.5 * rng.gaussian(), 0.5 * rng.gaussian()}));

  TrainConfig cfg = rbf_config(1.0);
  cfg.balance = true;
  const Classifier c = train(data, cfg);
  CHECK(c.subspaces.size() == 7);  // round(60/10)=6 subsets + 1

  const int big = c.label_index("big");
  for (const auto& s : data) {
    if (s.label != "big") continue;
    const Prediction p = predict(c, s.features);
    CHECK(p.label == "big");
    CHECK(p.class_distances[big] <= 1e-6);
  }
}

TEST_CASE("splitting never changes the label set") {
  SplitMix64 rng(31);
  std::vector<Sample> data;
  for (int i = 0; i < 45; ++i) data.push_back(samp("x", {rng.gaussian(), rng.gaussian()}));
  for (int i = 0; i < 9; ++i) data.push_back(samp("y", {9 + rng.gaussian(), rng.gaussian()}));

  TrainConfig cfg = rbf_config();
  cfg.balance = true;
  const Classifier c = train(data, cfg);
  CHECK(c.labels == std::vector<std::string>{"x", "y"});
  CHECK(c.class_size("x") == 45);
  CHECK(c.class_size("y") == 9);
}

TEST_CASE("config validation") {
  TrainConfig cfg = rbf_config();
  cfg.balance_factor = 1.5;
  CHECK_THROWS_AS(cfg.validate(), input_error);

  TrainConfig bad_poly;
  bad_poly.kernel.family = KernelFamily::polynomial;
  bad_poly.kernel.degree = 0;
  CHECK_THROWS_AS(bad_poly.validate(), input_error);
}
