#include <cmath>
#include <limits>

#include "doctest.h"
#include "tcsurv/errors.hpp"
#include "tcsurv/hazard_model.hpp"
#include "tcsurv/targets.hpp"
#include "test_util.hpp"

using namespace tcsurv;

namespace {

SequenceRecord flat_sequence(std::size_t t, bool censored) {
    SequenceRecord seq{"s", {}, censored};
    for (std::size_t i = 0; i < t; ++i) seq.states.push_back({static_cast<double>(i)});
    return seq;
}

HazardMatrix constant_outputs(const std::vector<std::size_t>& windows, double h) {
    HazardMatrix m;
    for (std::size_t w : windows) {
        std::vector<double> hz(w + 1, h);
        std::vector<double> sv(w + 1, 1.0);
        hz[0] = 0.0;
        for (std::size_t d = 1; d <= w; ++d) sv[d] = sv[d - 1] * (1.0 - h);
        m.hazard.push_back(hz);
        m.survival.push_back(sv);
    }
    return m;
}

}  // namespace

TEST_CASE("hard_labels examples") {
    SUBCASE("t=3 uncensored") {
        const auto t = hard_labels(flat_sequence(3, false));
        REQUIRE(t.landmarks() == 3);
        CHECK(t.ytilde[0] == std::vector<double>{0.0, 0.0, 1.0});
        CHECK(t.ytilde[1] == std::vector<double>{0.0, 1.0});
        CHECK(t.ytilde[2] == std::vector<double>{1.0});
        for (const auto& row : t.wtilde) {
            for (double w : row) CHECK(w == 1.0);
        }
    }
    SUBCASE("t=3 censored") {
        const auto t = hard_labels(flat_sequence(3, true));
        for (const auto& row : t.ytilde) {
            for (double y : row) CHECK(y == 0.0);
        }
        for (const auto& row : t.wtilde) {
            for (double w : row) CHECK(w == 1.0);
        }
    }
    SUBCASE("t=1") {
        const auto t = hard_labels(flat_sequence(1, false));
        REQUIRE(t.landmarks() == 1);
        CHECK(t.window(0) == 0);
        CHECK(t.ytilde[0][0] == 1.0);
    }
}

TEST_CASE("initial_state_labels keeps only the first landmark") {
    const auto t = initial_state_labels(flat_sequence(4, false));
    CHECK(t.ytilde == hard_labels(flat_sequence(4, false)).ytilde);
    CHECK(t.wtilde[0] == std::vector<double>{1.0, 1.0, 1.0, 1.0});
    for (std::size_t l = 1; l < 4; ++l) {
        for (std::size_t d = 1; d <= t.window(l); ++d) CHECK(t.wtilde[l][d] == 0.0);
    }
}

TEST_CASE("table_windows") {
    CHECK(table_windows(3, 5, TableMode::WithinWindow) == std::vector<std::size_t>{2, 1, 0});
    CHECK(table_windows(3, 5, TableMode::Extended) == std::vector<std::size_t>{4, 3, 2});
    CHECK(table_windows(1, 1, TableMode::Extended) == std::vector<std::size_t>{0});
}

TEST_CASE("pseudo_table hand example, within window") {
    const auto seq = flat_sequence(3, false);
    const auto outputs = constant_outputs({2, 1, 0}, 0.2);
    const auto t = pseudo_table(seq, outputs, 0.5, TableMode::WithinWindow, 3);
    CHECK(t.ytilde[1][1] == 1.0);
    CHECK(t.ytilde[0][1] == 0.0);
    CHECK(t.ytilde[0][2] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(t.wtilde[0][1] == 1.0);
    CHECK(t.wtilde[1][1] == 1.0);
    CHECK(t.wtilde[0][2] == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("pseudo_table hand example, extended mode") {
    const auto seq = flat_sequence(2, true);
    const auto outputs = constant_outputs({3, 2}, 0.2);
    const auto t = pseudo_table(seq, outputs, 0.5, TableMode::Extended, 4);
    CHECK(t.ytilde[1] == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(t.wtilde[1][1] == 1.0);
    CHECK(t.wtilde[1][2] == doctest::Approx(0.8));
    CHECK(t.ytilde[0][1] == 0.0);
    CHECK(t.wtilde[0][1] == 1.0);
    CHECK(t.ytilde[0][2] == doctest::Approx(0.1));
    CHECK(t.wtilde[0][2] == doctest::Approx(0.9));
    CHECK(t.ytilde[0][3] == doctest::Approx(0.1));
    CHECK(t.wtilde[0][3] == doctest::Approx(0.72));

    const auto unc = pseudo_table(flat_sequence(2, false), outputs, 0.5, TableMode::Extended, 4);
    CHECK(unc.ytilde[1] == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(unc.wtilde[1] == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("pseudo_table at lambda 0 uses only bootstrapped outputs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto seq = testing::random_sequence(rng, 2, 8, "s");
        const auto model = testing::random_model(Architecture::Feedforward, {2, 8, 3}, seed);
        const auto w = table_windows(seq.duration(), 8, TableMode::WithinWindow);
        const auto hm = hazard_matrix(model, seq, w);
        const auto t = pseudo_table(seq, hm, 0.0, TableMode::WithinWindow, 8);
        const std::size_t last = seq.duration() - 1;
        for (std::size_t l = 0; l < last; ++l) {
            const double y_next = (l + 1 == last && !seq.censored) ? 1.0 : 0.0;
            CHECK(t.ytilde[l][1] == y_next);
            CHECK(t.wtilde[l][1] == 1.0);
            for (std::size_t d = 2; d <= w[l]; ++d) {
                CHECK(t.ytilde[l][d] == hm.hazard[l + 1][d - 1]);
                CHECK(t.wtilde[l][d] == hm.survival[l + 1][d - 1]);
            }
        }
    }
}

TEST_CASE("pseudo_table at lambda 1 equals hard labels bit for bit") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto seq = testing::random_sequence(rng, 3, 12, "s");
        const auto model = testing::random_model(Architecture::LinearCox, {3, 12, 0}, seed);
        const auto hm = hazard_matrix(model, seq, table_windows(seq.duration(), 12, TableMode::WithinWindow));
        const auto t = pseudo_table(seq, hm, 1.0, TableMode::WithinWindow, 12);
        const auto hard = hard_labels(seq);
        CHECK(t.ytilde == hard.ytilde);
        CHECK(t.wtilde == hard.wtilde);
    }
}

TEST_CASE("pseudo_table agrees with the explicit-sum oracle") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        for (auto mode : {TableMode::WithinWindow, TableMode::Extended}) {
            for (double lambda : {0.0, 0.3, 0.7, 1.0}) {
                Rng rng(seed);
                const std::size_t horizon = 6;
                const auto seq = testing::random_sequence(rng, 2, horizon, "s");
                const auto model = testing::random_model(Architecture::Feedforward, {2, horizon, 4}, seed, 1.0);
                const auto hm = hazard_matrix(model, seq, table_windows(seq.duration(), horizon, mode));
                const auto fast = pseudo_table(seq, hm, lambda, mode, horizon);
                const auto slow = pseudo_table_oracle(seq, hm, lambda, mode, horizon);
                REQUIRE(fast.landmarks() == slow.landmarks());
                for (std::size_t l = 0; l < fast.landmarks(); ++l) {
                    REQUIRE(fast.window(l) == slow.window(l));
                    for (std::size_t d = 0; d <= fast.window(l); ++d) {
                        CHECK(std::abs(fast.ytilde[l][d] - slow.ytilde[l][d]) <= 1e-12);
                        CHECK(std::abs(fast.wtilde[l][d] - slow.wtilde[l][d]) <= 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("pseudo_table invariants on random inputs") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed + 77);
        const std::size_t horizon = 15;
        const auto mode = seed % 2 ? TableMode::Extended : TableMode::WithinWindow;
        const double lambda = rng.uniform();
        const auto seq = testing::random_sequence(rng, 3, horizon, "s");
        const auto model = testing::random_model(Architecture::Feedforward, {3, horizon, 6}, seed, 2.0);
        const auto hm = hazard_matrix(model, seq, table_windows(seq.duration(), horizon, mode));
        const auto t = pseudo_table(seq, hm, lambda, mode, horizon);
        CHECK(t == pseudo_table(seq, hazard_matrix(model, seq, table_windows(seq.duration(), horizon, mode)),
                                lambda, mode, horizon));
        for (std::size_t l = 0; l < t.landmarks(); ++l) {
            CHECK(t.wtilde[l][0] == 1.0);
            for (std::size_t d = 0; d <= t.window(l); ++d) {
                CHECK(t.ytilde[l][d] >= 0.0);
                CHECK(t.ytilde[l][d] <= 1.0);
                CHECK(t.wtilde[l][d] >= 0.0);
                CHECK(t.wtilde[l][d] <= 1.0);
                if (d > 0) CHECK(t.wtilde[l][d] <= t.wtilde[l][d - 1]);
            }
        }
    }
}

TEST_CASE("pseudo_table rejects bad arguments") {
    const auto seq = flat_sequence(3, false);
    const auto outputs = constant_outputs({2, 1, 0}, 0.2);
    CHECK_THROWS_AS(pseudo_table(seq, outputs, -0.1, TableMode::WithinWindow, 3), PreconditionError);
    CHECK_THROWS_AS(pseudo_table(seq, outputs, 1.5, TableMode::WithinWindow, 3), PreconditionError);
    CHECK_THROWS_AS(pseudo_table(seq, outputs, std::numeric_limits<double>::quiet_NaN(),
                                 TableMode::WithinWindow, 3),
                    PreconditionError);
    CHECK_THROWS_AS(pseudo_table(seq, constant_outputs({1, 1, 0}, 0.2), 0.5, TableMode::WithinWindow, 3),
                    PreconditionError);
    CHECK_THROWS_AS(pseudo_table_oracle(seq, outputs, 2.0, TableMode::WithinWindow, 3), PreconditionError);
}
