#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "tcsurv/errors.hpp"
#include "tcsurv/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace tcsurv;
using testing::make_dataset;
using testing::random_curves;

TEST_CASE("kaplan_meier examples") {
    const auto km = kaplan_meier({1, 2, 3}, {false, true, false});
    CHECK(km.at(0) == 1.0);
    CHECK(km.at(1) == doctest::Approx(2.0 / 3.0));
    CHECK(km.at(2) == doctest::Approx(2.0 / 3.0));
    CHECK(km.at(3) == 0.0);
    CHECK(km.at(10) == 0.0);

    const auto all_cens = kaplan_meier({1, 4, 2}, {true, true, true});
    for (double v : all_cens.values) CHECK(v == 1.0);

    const auto single = kaplan_meier({3}, {false});
    CHECK(single.at(2) == 1.0);
    CHECK(single.at(3) == 0.0);

    CHECK_THROWS_AS(kaplan_meier({}, {}), PreconditionError);
    CHECK_THROWS_AS(kaplan_meier({0}, {false}), PreconditionError);
}

TEST_CASE("kaplan_meier matches redistribution to the right") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const std::size_t n = 1 + rng.below(10);
        std::vector<std::size_t> t(n);
        std::vector<bool> c(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = 1 + rng.below(6);
            c[i] = rng.uniform() < 0.4;
        }
        const auto km = kaplan_meier(t, c);
        const auto ref = testing::km_redistribution(t, c);
        REQUIRE(km.values.size() == ref.size());
        CHECK(km.at(0) == 1.0);
        for (std::size_t k = 0; k < ref.size(); ++k) {
            CHECK(km.values[k] == doctest::Approx(ref[k]).epsilon(1e-12));
            if (k > 0) CHECK(km.values[k] <= km.values[k - 1]);
            CHECK(km.values[k] >= 0.0);
        }
    }
}

TEST_CASE("concordance examples") {
    const auto ds = make_dataset({1, 2, 3}, {false, false, false}, 3);
    SUBCASE("perfect ranking") {
        SurvivalCurves curves(3, std::vector<double>(4));
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t k = 0; k < 4; ++k) curves[i][k] = 0.1 * static_cast<double>(i + 1);
        }
        const auto r = concordance_index(curves, ds);
        CHECK(r.pairs == 3);
        CHECK(*r.ci == 1.0);
    }
    SUBCASE("constant prediction") {
        const SurvivalCurves curves(3, std::vector<double>(4, 0.7));
        CHECK(*concordance_index(curves, ds).ci == 0.5);
    }
    SUBCASE("one discordant pair of three") {
        SurvivalCurves curves(3, std::vector<double>(4));
        curves[0] = {1.0, 0.2, 0.1, 0.0};
        curves[1] = {1.0, 0.5, 0.4, 0.0};
        curves[2] = {1.0, 0.3, 0.3, 0.0};  // ranked below record 1 at t = 2
        CHECK(*concordance_index(curves, ds).ci == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("no comparable pairs") {
        const auto cens = make_dataset({2, 3}, {true, true}, 3);
        const auto r = concordance_index(SurvivalCurves(2, std::vector<double>(4, 0.5)), cens);
        CHECK(!r.ci.has_value());
        CHECK(r.pairs == 0);
    }
}

TEST_CASE("concordance properties") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const std::size_t n = 5 + rng.below(20);
        const std::size_t horizon = 8;
        std::vector<std::size_t> t(n);
        std::vector<bool> c(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = 1 + rng.below(horizon);
            c[i] = rng.uniform() < 0.3;
        }
        const auto ds = make_dataset(t, c, horizon);
        const auto curves = random_curves(rng, n, horizon);
        const auto base = concordance_index(curves, ds);
        if (!base.ci) continue;

        auto transformed = curves;
        auto negated = curves;
        for (auto& row : transformed) {
            for (auto& v : row) v = std::exp(3.0 * v) - 7.0;
        }
        for (auto& row : negated) {
            for (auto& v : row) v = -v;
        }
        CHECK(*concordance_index(transformed, ds).ci == *base.ci);
        CHECK(*base.ci + *concordance_index(negated, ds).ci == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("brier curve matches the direct-summation reference") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed + 500);
        const std::size_t n = 1 + rng.below(12);
        const std::size_t horizon = 2 + rng.below(6);
        std::vector<std::size_t> t(n);
        std::vector<bool> c(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = 1 + rng.below(horizon);
            c[i] = rng.uniform() < 0.4;
        }
        const auto ds = make_dataset(t, c, horizon);
        const auto curves = random_curves(rng, n, horizon);
        const auto bs = brier_curve(curves, ds);
        const auto ref = testing::brier_reference(curves, ds);
        REQUIRE(bs.size() == horizon);
        for (std::size_t k = 0; k < horizon; ++k) CHECK(std::abs(bs[k] - ref[k]) <= 1e-12);
    }
}

TEST_CASE("brier curve of a perfect predictor is zero") {
    const auto ds = make_dataset({2, 3, 5, 4, 2}, {false, false, false, false, false}, 5);
    SurvivalCurves curves;
    for (const auto& r : ds.records) {
        std::vector<double> row(6);
        for (std::size_t k = 0; k <= 5; ++k) row[k] = k < r.duration() - 1 ? 1.0 : 0.0;
        curves.push_back(row);
    }
    for (double v : brier_curve(curves, ds)) CHECK(v == 0.0);
}

TEST_CASE("brier curve degenerate cases") {
    const auto ds = make_dataset({1, 1}, {true, true}, 3);
    const SurvivalCurves curves(2, std::vector<double>(4, 0.5));
    const auto bs = brier_curve(curves, ds);
    CHECK(bs[0] == doctest::Approx(0.25));
    CHECK(bs[1] == 0.0);
    CHECK(bs[2] == 0.0);
    CHECK_THROWS_AS(brier_curve(SurvivalCurves(1, std::vector<double>(4, 0.5)), ds), PreconditionError);
}

TEST_CASE("ibs") {
    CHECK(ibs({0.2, 0.2, 0.2, 0.2, 0.2}) == doctest::Approx(0.2));
    CHECK(ibs({0.0, 0.1, 0.2}) == doctest::Approx(0.1));
    CHECK(ibs({0.0, 0.0}) == 0.0);
}

TEST_CASE("evaluate a zero model") {
    const auto ds = testing::random_dataset(3, 40, 2, 6);
    const auto model = init_params(Architecture::LinearCox, {2, 6, 0}, 0);
    const auto rep = evaluate(model, ds);
    if (rep.ci) CHECK(*rep.ci == 0.5);
    CHECK(rep.bs_curve.size() == 6);
    CHECK(rep.ibs == ibs(rep.bs_curve));
    const auto j = to_json(rep);
    CHECK(j.at("bs_curve").size() == 6);
    CHECK(bs_curve_csv(rep.bs_curve).rfind("k,bs\n0,", 0) == 0);
}

TEST_CASE("variability_delta") {
    const auto a = variability_delta({{0.4, 0.6}});
    REQUIRE(a.delta.size() == 1);
    CHECK(a.delta[0] == doctest::Approx(0.4).epsilon(1e-12));

    const auto b = variability_delta({{0.5, 0.5, 0.5, 0.7}});
    CHECK(b.delta[0] == doctest::Approx(std::sqrt(0.0075) / 0.2475).epsilon(1e-12));
    CHECK(b.delta[0] == doctest::Approx(0.34991).epsilon(1e-4));

    CHECK(variability_delta({{0.3, 0.3, 0.3}}).delta[0] == 0.0);

    const auto mixed = variability_delta({{0.0, 0.0}, {0.4, 0.6}, {1.0, 1.0}, {0.5, 0.5, 0.5, 0.7}});
    CHECK(mixed.excluded == 2);
    CHECK(mixed.delta.size() == 2);
    CHECK(mixed.mean == doctest::Approx((0.4 + b.delta[0]) / 2.0));

    const auto perm = variability_delta({{0.6, 0.4}, {0.7, 0.5, 0.5, 0.5}});
    CHECK(perm.delta[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(perm.delta[1] == doctest::Approx(b.delta[0]).epsilon(1e-12));

    CHECK_THROWS_AS(variability_delta({{0.5}}), PreconditionError);
}
