#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "tcsurv/config.hpp"
#include "tcsurv/errors.hpp"

using namespace tcsurv;

TEST_CASE("parse ignores comments and blank lines") {
    const auto cfg = Config::parse(
        "# experiment\n"
        "\n"
        "train.lambda = 0.9\n"
        "  gen.n=200  \n"
        "model.arch = feedforward\n");
    CHECK(cfg.entries().size() == 3);
    CHECK(cfg.get_double("train.lambda", 0.0) == 0.9);
    CHECK(cfg.get_size("gen.n", 1) == 200);
    CHECK(cfg.get_string("model.arch", "linear") == "feedforward");
    CHECK(cfg.get_string("missing", "x") == "x");
    CHECK(!cfg.find("missing").has_value());
}

TEST_CASE("later assignments win") {
    auto cfg = Config::parse("seed = 1\nseed = 2\n");
    CHECK(cfg.get_u64("seed", 0) == 2);
    cfg.assign("seed=7");
    CHECK(cfg.get_u64("seed", 0) == 7);
    cfg.set("seed", "9");
    CHECK(cfg.get_u64("seed", 0) == 9);
}

TEST_CASE("typed getters") {
    const auto cfg = Config::parse(
        "a = true\nb = 0\nc = 1e-4\nd = 0.0, 0.9,0.95\ne = 10,50\nf = sa_init, dtcsr\n");
    CHECK(cfg.get_bool("a", false));
    CHECK(!cfg.get_bool("b", true));
    CHECK(cfg.get_double("c", 0.0) == 1e-4);
    CHECK(cfg.get_doubles("d", {}) == std::vector<double>{0.0, 0.9, 0.95});
    CHECK(cfg.get_sizes("e", {}) == std::vector<std::size_t>{10, 50});
    CHECK(cfg.get_strings("f", {}) == std::vector<std::string>{"sa_init", "dtcsr"});
    CHECK(cfg.get_sizes("none", {3}) == std::vector<std::size_t>{3});
}

TEST_CASE("malformed input") {
    CHECK_THROWS_AS(Config::parse("just words\n"), DataError);
    CHECK_THROWS_AS(Config::parse("= 3\n"), DataError);
    const auto cfg = Config::parse("x = abc\ny = -3\nz = 1.5\nw = maybe\n");
    CHECK_THROWS_AS(cfg.get_double("x", 0.0), DataError);
    CHECK_THROWS_AS(cfg.get_size("y", 0), DataError);
    CHECK_THROWS_AS(cfg.get_size("z", 0), DataError);
    CHECK_THROWS_AS(cfg.get_bool("w", false), DataError);
    CHECK_THROWS_AS(Config::load("/nonexistent/dir/run.cfg"), DataError);
}

TEST_CASE("to_text round trip") {
    auto cfg = Config::parse("b = 2\na = x y\ntrain.lambda = 0.95\n");
    const auto text = cfg.to_text();
    CHECK(text == "a=x y\nb=2\ntrain.lambda=0.95\n");
    CHECK(Config::parse(text).entries() == cfg.entries());

    const auto path = std::filesystem::temp_directory_path() / "tcsurv_test_config.cfg";
    std::ofstream(path) << text;
    CHECK(Config::load(path).entries() == cfg.entries());
    std::filesystem::remove(path);
}

TEST_CASE("format_double") {
    CHECK(format_double(0.0) == "0.0");
    CHECK(format_double(1.0) == "1.0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.95) == "0.95");
    CHECK(format_double(1e-4) == "1e-04");
    for (double v : {0.1 + 0.2, -3.25e-17, 123456.789, 1.0 / 3.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
