#include "ctscreen/gbdt.hpp"

#include "ctscreen/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ctscreen;
using namespace ctscreen::gbdt;

namespace {

// 1-D threshold-separable data: feature < 0 -> label 0, else 1.
std::pair<Matrix, std::vector<int>> separable_fixture() {
    Matrix x;
    std::vector<int> y;
    for (int i = 1; i <= 10; ++i) {
        const double v = -0.1 * i;
        x.push_row(std::vector<double>{v});
        y.push_back(0);
    }
    for (int i = 1; i <= 10; ++i) {
        const double v = 0.07 * i;
        x.push_row(std::vector<double>{v});
        y.push_back(1);
    }
    return {x, y};
}

// XOR corners, ten copies each.
std::pair<Matrix, std::vector<int>> xor_fixture() {
    Matrix x;
    std::vector<int> y;
    for (int rep = 0; rep < 10; ++rep) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                x.push_row(std::vector<double>{a ? 1.0 : -1.0, b ? 1.0 : -1.0});
                y.push_back(a ^ b);
            }
        }
    }
    return {x, y};
}

double train_accuracy(const GbdtModel& model, const Matrix& x, const std::vector<int>& y) {
    const auto scores = predict(model, x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if ((scores[i] >= 0.5 ? 1 : 0) == y[i])
            ++correct;
    return static_cast<double>(correct) / y.size();
}

} // namespace

TEST_CASE("degenerate single-class labels give a constant model") {
    Matrix x;
    x.push_row(std::vector<double>{1.0});
    x.push_row(std::vector<double>{2.0});
    x.push_row(std::vector<double>{3.0});
    const TrainResult r = train(x, {1, 1, 1});
    CHECK(r.model.trees.empty());
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].code == "DegenerateLabels");

    const auto scores = predict(r.model, x);
    CHECK(scores[0] == scores[1]);
    CHECK(scores[0] == scores[2]);
    CHECK(scores[0] > 0.999); // clipped toward 1
}

TEST_CASE("separable fixture trains to perfect accuracy with stumps") {
    const auto [x, y] = separable_fixture();
    TrainConfig cfg;
    cfg.max_depth = 1;
    cfg.num_rounds = 10;
    const TrainResult r = train(x, y, cfg);
    CHECK(train_accuracy(r.model, x, y) == 1.0);

    SUBCASE("training scores land on the correct side of 0.5") {
        const auto scores = predict(r.model, x);
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i])
                CHECK(scores[i] >= 0.5);
            else
                CHECK(scores[i] < 0.5);
        }
    }
    SUBCASE("per-round training loss never increases") {
        REQUIRE(r.round_log_loss.size() == 11);
        for (std::size_t i = 1; i < r.round_log_loss.size(); ++i)
            CHECK(r.round_log_loss[i] <= r.round_log_loss[i - 1]);
        CHECK(r.round_log_loss.back() < r.round_log_loss.front());
    }
}

TEST_CASE("XOR needs depth 2") {
    const auto [x, y] = xor_fixture();
    TrainConfig stump;
    stump.max_depth = 1;
    stump.num_rounds = 50;
    CHECK(train_accuracy(train(x, y, stump).model, x, y) <= 0.75);

    TrainConfig deep;
    deep.max_depth = 2;
    deep.num_rounds = 50;
    CHECK(train_accuracy(train(x, y, deep).model, x, y) == 1.0);
}

TEST_CASE("prediction is deterministic and in (0,1)") {
    const auto [x, y] = separable_fixture();
    const TrainResult r = train(x, y);
    const auto s1 = predict(r.model, x);
    const auto s2 = predict(r.model, x);
    CHECK(s1 == s2); // bitwise
    for (double s : s1) {
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
}

TEST_CASE("training is deterministic: identical model bytes") {
    const auto [x, y] = separable_fixture();
    TrainConfig cfg;
    cfg.seed = 42;
    const auto bytes_a = save_model(train(x, y, cfg).model);
    const auto bytes_b = save_model(train(x, y, cfg).model);
    CHECK(bytes_a == bytes_b);
}

TEST_CASE("predictions are invariant under monotone feature rescaling") {
    const auto [x, y] = separable_fixture();
    Matrix cubed = x;
    for (auto& v : cubed.data)
        v = v * v * v;
    TrainConfig cfg;
    cfg.num_rounds = 20;
    const auto original = predict(train(x, y, cfg).model, x);
    const auto transformed = predict(train(cubed, y, cfg).model, cubed);
    REQUIRE(original.size() == transformed.size());
    for (std::size_t i = 0; i < original.size(); ++i)
        CHECK(original[i] == doctest::Approx(transformed[i]).epsilon(1e-12));
}

TEST_CASE("model serialization") {
    const auto [x, y] = separable_fixture();
    const TrainResult r = train(x, y);
    const auto bytes = save_model(r.model);
    const GbdtModel loaded = load_model(bytes);
    CHECK(predict(loaded, x) == predict(r.model, x)); // bitwise

    SUBCASE("truncated stream") {
        auto cut = bytes;
        cut.resize(cut.size() / 2);
        try {
            load_model(cut);
            FAIL("expected MalformedModel");
        } catch (const PipelineError& e) {
            CHECK(e.code() == Errc::MalformedModel);
        }
    }
    SUBCASE("version mismatch names the version") {
        auto bad = bytes;
        bad[4] = 99;
        try {
            load_model(bad);
            FAIL("expected MalformedModel");
        } catch (const PipelineError& e) {
            CHECK(e.code() == Errc::MalformedModel);
            CHECK(std::string(e.what()).find("version") != std::string::npos);
        }
    }
    SUBCASE("bad magic") {
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(load_model(bad), PipelineError);
    }
    SUBCASE("text dump lists every node") {
        std::ostringstream os;
        dump_model(r.model, os);
        CHECK(os.str().find("base_score") != std::string::npos);
        CHECK(os.str().find("tree 0") != std::string::npos);
        CHECK(os.str().find("leaf value") != std::string::npos);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const auto [x, y] = separable_fixture();
    const TrainResult r = train(x, y);

    Matrix wide;
    wide.push_row(std::vector<double>{1.0, 2.0});
    try {
        predict(r.model, wide);
        FAIL("expected DimensionMismatch");
    } catch (const PipelineError& e) {
        CHECK(e.code() == Errc::DimensionMismatch);
    }

    std::vector<int> short_labels(x.num_rows - 1, 0);
    CHECK_THROWS_AS(train(x, short_labels), PipelineError);
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), PipelineError);
    cfg.learning_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), PipelineError);
    cfg = {};
    cfg.num_rounds = 0;
    CHECK_THROWS_AS(cfg.validate(), PipelineError);
}

TEST_CASE("patient_score modes") {
    // train a model over pyramid vectors of a small region scheme
    const pyramid::RegionScheme scheme = pyramid::default_scheme();
    VolumeExtent extent;
    extent.x_max = extent.y_max = 100;
    extent.z_max = 80;

    const auto make_nodule = [](double x, double y, double z, double d, double malignancy) {
        encode::NoduleRecord n;
        n.x_mm = x;
        n.y_mm = y;
        n.z_mm = z;
        n.diameter_mm = d;
        n.confidence = 1.0;
        n.features.malignancy = malignancy;
        return n;
    };

    testutil::Rng rng(601);
    std::uniform_real_distribution<double> u(0, 1);
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        const bool cancer = i % 2;
        std::vector<encode::NoduleRecord> ns;
        if (cancer)
            ns.push_back(make_nodule(20 + 60 * u(rng), 20 + 60 * u(rng), 10 + 60 * u(rng),
                                     14 + 6 * u(rng), 0.8 + 0.2 * u(rng)));
        else if (u(rng) < 0.7)
            ns.push_back(make_nodule(20 + 60 * u(rng), 20 + 60 * u(rng), 10 + 60 * u(rng),
                                     3 + 3 * u(rng), 0.2 * u(rng)));
        x.push_row(pyramid::pool(ns, scheme, extent));
        y.push_back(cancer);
    }
    const GbdtModel model = train(x, y).model;

    SUBCASE("empty list scores the zero vector in both modes") {
        const double whole = patient_score(model, {}, scheme, extent, ScoreMode::Whole);
        const double max_mode = patient_score(model, {}, scheme, extent, ScoreMode::MaxNodule);
        CHECK(whole == max_mode);
        const pyramid::PyramidVector zeros(scheme.regions.size() * pyramid::kValuesPerRegion,
                                           0.0);
        CHECK(whole == predict_one(model, zeros));
    }
    SUBCASE("single nodule: both modes agree exactly") {
        const std::vector<encode::NoduleRecord> one = {make_nodule(50, 50, 40, 15, 0.9)};
        CHECK(patient_score(model, one, scheme, extent, ScoreMode::Whole) ==
              patient_score(model, one, scheme, extent, ScoreMode::MaxNodule));
    }
    SUBCASE("MaxNodule equals the max over per-nodule scores") {
        const std::vector<encode::NoduleRecord> two = {make_nodule(25, 25, 20, 15, 0.9),
                                                       make_nodule(75, 75, 60, 4, 0.1)};
        double best = 0;
        for (std::size_t i = 0; i < two.size(); ++i) {
            const auto v = pyramid::pool(pyramid::mask_single(two, i), scheme, extent);
            best = std::max(best, predict_one(model, v));
        }
        CHECK(patient_score(model, two, scheme, extent, ScoreMode::MaxNodule) == best);
    }
}
