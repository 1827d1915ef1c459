#include <cmath>
#include <vector>

#include "doctest.h"
#include "tcsurv/errors.hpp"
#include "tcsurv/optim.hpp"

using namespace tcsurv;

TEST_CASE("adam_step with zero gradient and no decay leaves parameters alone") {
    std::vector<double> p{1.0, -2.0, 0.5};
    const std::vector<double> g(3, 0.0);
    AdamState s;
    s.m = {0.2, 0.0, -0.1};
    s.v = {0.04, 0.0, 0.01};
    s.step = 3;
    AdamHyper h;
    h.lr = 0.0;
    adam_step(p, g, s, h);
    CHECK(p == std::vector<double>{1.0, -2.0, 0.5});
    CHECK(s.m[0] == doctest::Approx(0.18));
    CHECK(s.v[0] == doctest::Approx(0.04 * 0.999));
    CHECK(s.step == 4);
}

TEST_CASE("first adam step moves each parameter by about lr") {
    for (double g : {1e-3, 0.5, -3.0, 100.0}) {
        std::vector<double> p{2.0};
        const std::vector<double> grad{g};
        AdamState s;
        AdamHyper h;
        h.lr = 0.01;
        adam_step(p, grad, s, h);
        CHECK(std::abs(p[0] - 2.0) == doctest::Approx(0.01).epsilon(1e-4));
        CHECK((p[0] < 2.0) == (g > 0.0));
        CHECK(s.m.size() == 1);
        CHECK(s.step == 1);
    }
}

TEST_CASE("adam decoupled weight decay") {
    std::vector<double> p{1.0};
    const std::vector<double> g{0.0};
    AdamState s;
    AdamHyper h;
    h.lr = 0.01;
    h.weight_decay = 0.0001;
    adam_step(p, g, s, h);
    CHECK(p[0] == doctest::Approx(0.999999).epsilon(1e-15));
}

TEST_CASE("sgd_step") {
    std::vector<double> p{1.0};
    sgd_step(p, std::vector<double>{0.0}, 0.1, 0.0);
    CHECK(p[0] == 1.0);
    sgd_step(p, std::vector<double>{0.5}, 0.1, 0.0);
    CHECK(p[0] == doctest::Approx(0.95));
    p = {1.0};
    sgd_step(p, std::vector<double>{0.0}, 0.1, 0.4);
    CHECK(p[0] == doctest::Approx(0.96));
}

TEST_CASE("optimizer steps reject shape mismatches") {
    std::vector<double> p{1.0, 2.0};
    const std::vector<double> g{0.0};
    AdamState s;
    CHECK_THROWS_AS(adam_step(p, g, s, AdamHyper{}), PreconditionError);
    CHECK_THROWS_AS(sgd_step(p, g, 0.1, 0.0), PreconditionError);
}
