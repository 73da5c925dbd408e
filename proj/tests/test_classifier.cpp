#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "core/errors.hpp"
#include "core/mlp.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace affectfuse;

namespace {

// three well-separated 2-D Gaussian blobs
Dataset blobs(std::size_t per_class, double spread, std::uint64_t seed) {
    Rng rng(seed);
    const double cx[3] = {0, 6, -6};
    const double cy[3] = {6, -4, -4};
    Dataset d;
    d.dim = 2;
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            d.x.push_back(cx[c] + rng.normal(0, spread));
            d.x.push_back(cy[c] + rng.normal(0, spread));
            d.y.push_back(c);
        }
    }
    d.n = d.y.size();
    return d;
}

double train_accuracy(const MlpModel& model, const Dataset& d) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.n; ++i) {
        auto p = model.forward(d.row(i));
        int pred = (int)(std::max_element(p.begin(), p.end()) - p.begin());
        if (pred == d.y[i]) ++correct;
    }
    return (double)correct / (double)d.n;
}

}  // namespace

TEST_CASE("forward: zero model yields uniform probabilities") {
    auto m = MlpModel::zeros({4, 8, 8, 3});
    auto p = m.forward(std::vector<double>{1, -2, 3, 0.5});
    REQUIRE(p.size() == 3);
    for (double v : p) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("forward: probabilities sum to one for random inputs") {
    auto m = MlpModel::init({5, 16, 8, 4}, 99);
    Rng rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(5);
        for (double& v : x) v = rng.uniform(-50, 50);
        auto p = m.forward(x);
        double sum = 0;
        for (double v : p) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("forward: softmax invariant to a constant logit shift") {
    auto m = MlpModel::init({3, 6, 3}, 7);
    auto shifted = m;
    for (double& b : shifted.biases.back()) b += 37.5;
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        auto p = m.forward(x);
        auto q = shifted.forward(x);
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(q[i]));
    }
}

TEST_CASE("forward: inference is deterministic; dimension mismatch rejected") {
    auto m = MlpModel::init({4, 10, 5, 3}, 11);
    std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
    CHECK(m.forward(x) == m.forward(x));
    CHECK_THROWS_AS(m.forward(std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("gradients match central finite differences within 1e-4 relative") {
    auto model = MlpModel::init({3, 5, 4, 3}, 123, 0.0);
    Dataset batch;
    batch.dim = 3;
    Rng rng(5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 3; ++j) batch.x.push_back(rng.uniform(-1, 1));
        batch.y.push_back((int)rng.below(3));
    }
    batch.n = 5;
    std::vector<std::size_t> idx = {0, 1, 2, 3, 4};

    std::vector<std::vector<double>> gw, gb;
    mlp_loss_and_gradients(model, batch, idx, gw, gb, false, nullptr);

    auto loss_fn = [&]() {
        std::vector<std::vector<double>> tw, tb;
        return mlp_loss_and_gradients(model, batch, idx, tw, tb, false, nullptr);
    };
    double max_rel = 0.0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        for (std::size_t k = 0; k < model.weights[l].size(); ++k) {
            const double num = oracle::central_difference(loss_fn, model.weights[l][k]);
            const double rel = std::abs(num - gw[l][k]) / std::max(1e-8, std::abs(num) + std::abs(gw[l][k]));
            max_rel = std::max(max_rel, rel);
        }
        for (std::size_t k = 0; k < model.biases[l].size(); ++k) {
            const double num = oracle::central_difference(loss_fn, model.biases[l][k]);
            const double rel = std::abs(num - gb[l][k]) / std::max(1e-8, std::abs(num) + std::abs(gb[l][k]));
            max_rel = std::max(max_rel, rel);
        }
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("first-batch loss is ln(C) for a zero-initialized output layer") {
    auto model = MlpModel::init({2, 16, 8, 3}, 21, 0.0);
    for (double& w : model.weights.back()) w = 0.0;
    Dataset d = blobs(30, 0.5, 3);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 64 && i < d.n; ++i) idx.push_back(i);
    std::vector<std::vector<double>> gw, gb;
    const double loss = mlp_loss_and_gradients(model, d, idx, gw, gb, false, nullptr);
    CHECK(loss == doctest::Approx(std::log(3.0)).epsilon(0.1 / std::log(3.0)));
}

TEST_CASE("training separable blobs reaches 99% within 100 epochs") {
    Dataset d = blobs(100, 0.5, 17);
    auto model = MlpModel::init({2, 100, 20, 3}, 42, 0.5);
    TrainConfig cfg;
    cfg.adam.learning_rate = 1e-4;
    cfg.epochs = 100;
    cfg.per_epoch_budget = 300;
    auto result = train_mlp(model, d, cfg, 7);
    CHECK(result.epoch_loss.size() == 100);
    CHECK(result.epoch_loss.back() < result.epoch_loss.front());
    CHECK(train_accuracy(model, d) >= 0.99);
}

TEST_CASE("training is bit-reproducible given the same seed") {
    Dataset d = blobs(40, 0.8, 33);
    auto m1 = MlpModel::init({2, 20, 10, 3}, 5, 0.5);
    auto m2 = MlpModel::init({2, 20, 10, 3}, 5, 0.5);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.per_epoch_budget = 120;
    train_mlp(m1, d, cfg, 99);
    train_mlp(m2, d, cfg, 99);
    for (std::size_t l = 0; l < m1.weights.size(); ++l) {
        CHECK(m1.weights[l] == m2.weights[l]);
        CHECK(m1.biases[l] == m2.biases[l]);
    }
}

TEST_CASE("training aborts on non-finite loss with diagnostics") {
    Dataset d = blobs(20, 0.5, 3);
    for (double& v : d.x) v *= 1e308;  // logits overflow, softmax turns NaN
    auto model = MlpModel::init({2, 8, 3}, 1, 0.0);
    TrainConfig cfg;
    cfg.epochs = 2;
    CHECK_THROWS_WITH_AS(train_mlp(model, d, cfg, 1), doctest::Contains("non-finite"), RuntimeError);
}

TEST_CASE("balanced sampler: equal quotas across balanced classes") {
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 100; ++i) labels.push_back(c);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        BalancedSampler sampler(labels, 3, 300);
        Rng rng(seed);
        auto stream = sampler.epoch(rng);
        REQUIRE(stream.size() == 300);
        std::map<int, int> per_class;
        for (auto i : stream) ++per_class[labels[i]];
        for (int c = 0; c < 3; ++c) CHECK(per_class[c] == 100);
    }
}

TEST_CASE("balanced sampler: minority indices recycled about factor times") {
    // 3 classes, minority has 10 samples; budget 90 -> 30 draws per class ->
    // every minority index appears exactly 3 times per epoch
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) labels.push_back(0);
    for (int i = 0; i < 200; ++i) labels.push_back(1);
    for (int i = 0; i < 150; ++i) labels.push_back(2);
    BalancedSampler sampler(labels, 3, 90);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        auto stream = sampler.epoch(rng);
        std::map<std::size_t, int> occurrences;
        for (auto i : stream)
            if (labels[i] == 0) ++occurrences[i];
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(occurrences[i] >= 2);
            CHECK(occurrences[i] <= 5);
        }
    }
}

TEST_CASE("balanced sampler: oversample factors skew the quotas") {
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) labels.push_back(0);
    for (int i = 0; i < 50; ++i) labels.push_back(1);
    BalancedSampler sampler(labels, 2, 300, {2.0, 1.0});
    CHECK(sampler.quotas()[0] == 200);
    CHECK(sampler.quotas()[1] == 100);
}

TEST_CASE("balanced sampler: zero budget and empty demanded class rejected") {
    std::vector<int> labels = {0, 0, 1};
    CHECK_THROWS_AS(BalancedSampler(labels, 2, 0), ValidationError);
    std::vector<int> only_zero = {0, 0, 0};
    CHECK_THROWS_AS(BalancedSampler(only_zero, 2, 10), ValidationError);
}

TEST_CASE("normalizer: train range mapping, no clamping, constant columns") {
    Dataset train;
    train.dim = 2;
    train.x = {0, 5, 10, 5};  // col0 in [0,10], col1 constant 5
    train.y = {0, 0};
    train.n = 2;
    auto nz = Normalizer::fit(train);

    double row[2] = {5, 123};
    nz.apply_row(row, 2);
    CHECK(row[0] == doctest::Approx(0.5));
    CHECK(row[1] == 0.0);

    double out_of_range[2] = {20, 0};
    nz.apply_row(out_of_range, 2);
    CHECK(out_of_range[0] == doctest::Approx(2.0));

    Dataset t2 = train;
    nz.apply(t2);
    CHECK(t2.x[0] == 0.0);
    CHECK(t2.x[2] == 1.0);
}

TEST_CASE("normalizer: fit-apply puts non-constant train columns exactly in [0,1]") {
    Rng rng(12);
    Dataset train;
    train.dim = 6;
    train.n = 40;
    for (std::size_t i = 0; i < train.n * train.dim; ++i) train.x.push_back(rng.uniform(-30, 30));
    train.y.assign(train.n, 0);
    auto nz = Normalizer::fit(train);
    Dataset copy = train;
    nz.apply(copy);
    for (std::size_t j = 0; j < copy.dim; ++j) {
        double mn = 1e9, mx = -1e9;
        for (std::size_t i = 0; i < copy.n; ++i) {
            mn = std::min(mn, copy.row(i)[j]);
            mx = std::max(mx, copy.row(i)[j]);
        }
        CHECK(mn == doctest::Approx(0.0));
        CHECK(mx == doctest::Approx(1.0));
    }
}

TEST_CASE("enrichment: default config is 1031 wide; bad widths rejected") {
    auto cfg = EnrichmentConfig::defaults();
    cfg.validate();
    int total = 0;
    for (const auto& h : cfg.heads) total += h.append_logits;
    CHECK(cfg.input_dim + total == 1031);

    auto bad = cfg;
    bad.heads[1].append_logits = 2;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("sum to 8"), ValidationError);
}

TEST_CASE("enrichment: zero-init heads append zeros and echo the embedding") {
    auto cfg = EnrichmentConfig::defaults();
    auto enr = SpeechEnrichment::zeros(cfg);
    Rng rng(3);
    std::vector<double> emb(1024);
    for (double& v : emb) v = rng.uniform(-1, 1);
    auto out = enr.apply(emb.data());
    REQUIRE(out.size() == 1031);
    for (int i = 0; i < 1024; ++i) CHECK(out[(size_t)i] == emb[(size_t)i]);
    for (int i = 1024; i < 1031; ++i) CHECK(out[(size_t)i] == 0.0);
}

TEST_CASE("enrichment: trained head separates synthetic VAD labels") {
    // small embeddings for speed: 3 well-separated classes in 16 dims
    EnrichmentConfig cfg;
    cfg.input_dim = 16;
    cfg.hidden = 16;
    cfg.target_width = 16 + 3;
    cfg.heads = {{"valence", 3, 3}};
    cfg.iterations = 400;
    cfg.batch_size = 32;

    Rng rng(8);
    Dataset emb;
    emb.dim = 16;
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 60; ++i) {
            for (int j = 0; j < 16; ++j) emb.x.push_back((j % 3 == c ? 3.0 : 0.0) + rng.normal(0, 0.3));
            labels.push_back(c);
        }
    }
    emb.n = labels.size();
    emb.y = labels;
    auto enr = SpeechEnrichment::train(emb, {labels}, cfg, 77);
    CHECK(enr.head_train_accuracy(0) >= 0.95);
    auto out = enr.apply(emb.row(0));
    CHECK(out.size() == 19);
}

TEST_CASE("enrichment: width errors are reported with the offending head") {
    EnrichmentConfig cfg;
    cfg.input_dim = 8;
    cfg.target_width = 12;
    cfg.heads = {{"categorical", 3, 5}};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("categorical"), ValidationError);
}
