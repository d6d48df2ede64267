#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pna/classifier.hpp"
#include "pna/rng.hpp"
#include "test_util.hpp"

using namespace pna;

namespace {

LabeledInstance inst(std::vector<double> features, int label) {
    return {std::nullopt, std::move(features), label};
}

std::vector<LabeledInstance> separable_toy(Rng& rng, std::size_t per_class = 20) {
    std::vector<LabeledInstance> data;
    for (std::size_t i = 0; i < per_class; ++i)
        data.push_back(inst({2.0 + rng.uniform01(), 2.0 + rng.uniform01()}, 1));
    for (std::size_t i = 0; i < per_class; ++i)
        data.push_back(inst({-2.0 - rng.uniform01(), -2.0 - rng.uniform01()}, -1));
    return data;
}

}  // namespace

TEST_CASE("separable toy set reaches training accuracy 1.0") {
    Rng rng(1);
    const auto data = separable_toy(rng);
    const LinkModel model = train(data);
    std::size_t correct = 0;
    for (const auto& d : data)
        correct += predict(model, {0, 0}, d.features).label == d.label;
    CHECK(correct == data.size());
}

TEST_CASE("uninformative features give probability near one half") {
    std::vector<LabeledInstance> data;
    for (int i = 0; i < 10; ++i) data.push_back(inst({3.0, 7.0}, i % 2 == 0 ? 1 : -1));
    const LinkModel model = train(data);
    const double p = predict_probability(model, {5.0, -4.0});
    CHECK(std::abs(p - 0.5) <= 0.05);
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(4242);
    const std::size_t n = 24, d = 5;
    std::vector<std::vector<double>> x(n, std::vector<double>(d));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : x[i]) v = rng.uniform01() * 4.0 - 2.0;
        y[i] = rng.bernoulli(0.5) ? 1 : -1;
    }
    std::vector<double> w(d);
    for (double& v : w) v = rng.uniform01() - 0.5;
    const double b = rng.uniform01() - 0.5;
    const double l2 = 1e-2;

    const LossGradient g = logistic_loss_gradient(x, y, w, b, l2);
    const double h = 1e-5;
    double max_rel = 0.0;
    for (std::size_t j = 0; j <= d; ++j) {
        auto loss_at = [&](double delta) {
            std::vector<double> wj = w;
            double bj = b;
            if (j < d) wj[j] += delta;
            else bj += delta;
            return logistic_loss_gradient(x, y, wj, bj, l2).loss;
        };
        const double numeric = (loss_at(h) - loss_at(-h)) / (2.0 * h);
        const double analytic = j < d ? g.weight_grad[j] : g.bias_grad;
        const double rel = std::abs(numeric - analytic) /
                           std::max({std::abs(numeric), std::abs(analytic), 1e-8});
        max_rel = std::max(max_rel, rel);
    }
    CHECK(max_rel <= 1e-4);
}

TEST_CASE("predict basics") {
    LinkModel model;
    model.weights = {0.0, 0.0};
    model.bias = 0.0;
    model.standardization.mean = {0.0, 0.0};
    model.standardization.stddev = {1.0, 1.0};

    SUBCASE("zero weights and bias give probability one half") {
        const PredictionScore s = predict(model, {1, 2}, {0.3, -0.7});
        CHECK(s.probability == doctest::Approx(0.5));
        CHECK(s.label == 1);  // threshold is >= 0.5
        CHECK(s.pair == Edge{1, 2});
    }
    SUBCASE("probability strictly increases along a positive weight") {
        model.weights = {1.0, 0.0};
        double prev = -1.0;
        for (double v : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            const double p = predict_probability(model, {v, 0.0});
            CHECK(p > prev);
            prev = p;
        }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(predict_probability(model, {1.0, 2.0, 3.0}), ConfigError);
    }
}

TEST_CASE("training predictions reproduce training labels on the toy set") {
    Rng rng(99);
    const auto data = separable_toy(rng, 15);
    const LinkModel model = train(data);
    for (const auto& d : data)
        CHECK(predict(model, {0, 0}, d.features).label == d.label);
}

TEST_CASE("training is deterministic per seed") {
    Rng rng(5);
    const auto data = separable_toy(rng, 10);
    TrainOptions opts;
    opts.seed = 31;
    const LinkModel a = train(data, opts);
    const LinkModel b = train(data, opts);
    CHECK(a == b);
}

TEST_CASE("single-class training data is rejected") {
    std::vector<LabeledInstance> data(5, inst({1.0}, 1));
    CHECK_THROWS_AS(train(data), ConfigError);
}

TEST_CASE("metric definitions") {
    SUBCASE("perfect ranking and labels") {
        std::vector<PredictionScore> scores = {{{0, 0}, 0.9, 1}, {{0, 1}, 0.8, 1},
                                               {{1, 0}, 0.2, -1}, {{1, 1}, 0.1, -1}};
        const Metrics m = compute_metrics(scores, {1, 1, -1, -1});
        CHECK(m.accuracy == 1.0);
        CHECK(m.f1 == 1.0);
        CHECK(*m.auc == 1.0);
    }
    SUBCASE("all probabilities equal gives AUC one half") {
        std::vector<PredictionScore> scores = {{{0, 0}, 0.4, -1}, {{0, 1}, 0.4, -1},
                                               {{1, 0}, 0.4, -1}};
        const Metrics m = compute_metrics(scores, {1, -1, -1});
        CHECK(*m.auc == 0.5);
    }
    SUBCASE("F1 is zero when positives exist but none are predicted") {
        std::vector<PredictionScore> scores = {{{0, 0}, 0.1, -1}, {{0, 1}, 0.2, -1}};
        const Metrics m = compute_metrics(scores, {1, -1});
        CHECK(m.f1 == 0.0);
        CHECK(m.accuracy == 0.5);
    }
    SUBCASE("absent class makes AUC an error") {
        std::vector<PredictionScore> scores = {{{0, 0}, 0.1, -1}};
        CHECK_THROWS_AS(compute_metrics(scores, {-1}), ConfigError);
    }
    SUBCASE("length mismatch and empty input are errors") {
        std::vector<PredictionScore> scores = {{{0, 0}, 0.1, -1}};
        CHECK_THROWS_AS(compute_metrics(scores, {1, -1}), ConfigError);
        CHECK_THROWS_AS(compute_metrics({}, {}), ConfigError);
    }
}

TEST_CASE("AUC equals the pairwise oracle exactly") {
    Rng rng(2718);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<PredictionScore> scores;
        std::vector<int> truth;
        const std::size_t n = 30;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = rng.uniform(5) / 4.0;  // deliberate ties
            scores.push_back({{0, static_cast<NodeId>(i)}, p, p >= 0.5 ? 1 : -1});
            truth.push_back(rng.bernoulli(0.4) ? 1 : -1);
        }
        bool pos = false, neg = false;
        for (int t : truth) (t == 1 ? pos : neg) = true;
        if (!pos || !neg) continue;
        const Metrics m = compute_metrics(scores, truth);
        CHECK(*m.auc == oracles::pairwise_auc(scores, truth));
    }
}

TEST_CASE("AUC is invariant under strictly monotone probability transforms") {
    Rng rng(13);
    std::vector<PredictionScore> scores;
    std::vector<int> truth;
    for (std::size_t i = 0; i < 40; ++i) {
        scores.push_back({{0, static_cast<NodeId>(i)}, rng.uniform01(), 1});
        truth.push_back(rng.bernoulli(0.5) ? 1 : -1);
    }
    truth[0] = 1;
    truth[1] = -1;
    std::vector<PredictionScore> squashed = scores;
    for (auto& s : squashed) s.probability = 0.25 + s.probability * s.probability / 2.0;
    CHECK(*compute_metrics(scores, truth).auc == *compute_metrics(squashed, truth).auc);
}

TEST_CASE("accuracy and F1 depend only on labels") {
    std::vector<PredictionScore> a = {{{0, 0}, 0.9, 1}, {{0, 1}, 0.6, 1}, {{1, 0}, 0.4, -1}};
    std::vector<PredictionScore> b = a;
    b[0].probability = 0.51;
    b[1].probability = 0.99;
    b[2].probability = 0.01;
    const std::vector<int> truth = {1, -1, -1};
    const Metrics ma = compute_metrics(a, truth);
    const Metrics mb = compute_metrics(b, truth);
    CHECK(ma.accuracy == mb.accuracy);
    CHECK(ma.f1 == mb.f1);
}

TEST_CASE("model serialization round-trips exactly") {
    Rng rng(777);
    const auto data = separable_toy(rng, 12);
    const LinkModel model = train(data);
    TempDir tmp;
    const auto path = tmp.path / "model.tsv";
    save_model(model, path);
    const LinkModel back = load_model(path);
    CHECK(back == model);
}
