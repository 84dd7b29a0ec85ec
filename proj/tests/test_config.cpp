#include "doctest.h"

#include <cmath>

#include "dangerwatch/config.hpp"
#include "dangerwatch/error.hpp"

using namespace dangerwatch;

TEST_CASE("defaults") {
    const auto cfg = parse_config_text("");
    CHECK(cfg.rng_seed == 42);
    CHECK(cfg.dc_population_size == 100);
    CHECK(cfg.tissue_capacity == 512);
    CHECK(cfg.signals.pamp_saturation == 5.0);
    CHECK(cfg.weights.csm.pamp == 2.0);
    CHECK(cfg.weights.mature.safe_suppression == 1.5);
    CHECK(cfg.dc.threshold_lo == 50.0);
    CHECK(cfg.dc.threshold_hi == 150.0);
    CHECK(cfg.dc.ngram_lengths == std::vector<std::size_t>{3, 5, 7});
    CHECK(cfg.lymph.activation_threshold == 100.0);
    CHECK(cfg.lymph.naive_lifespan == 50);
    CHECK(cfg.lymph.wildcard_prob == 0.2);
    CHECK(cfg.lymph.evidence_scale == 100.0);
    CHECK(cfg.response.memory_fraction == 0.10);
}

TEST_CASE("parsing values") {
    const auto cfg = parse_config_text(
        "# comment\n"
        "rng_seed = 7\n"
        "  threshold_lo=20   # trailing comment\n"
        "threshold_hi = 60\n"
        "ngram_lengths = 2, 4\n"
        "activation_threshold = inf\n");
    CHECK(cfg.rng_seed == 7);
    CHECK(cfg.dc.ngram_lengths == std::vector<std::size_t>{2, 4});
    CHECK(std::isinf(cfg.lymph.activation_threshold));
    CHECK(cfg.lymph.evidence_scale == 40.0);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config_text("rng_sed = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("rng_seed = 1\nrng_seed = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("rng_seed\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("cpu_scale = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("cpu_scale = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("threshold_lo = 200\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("ngram_lengths = 3, 12\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("wildcard_prob = 2\n"), ConfigError);
    try {
        parse_config_text("\n\nbogus = 3\n");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("dump round trip") {
    auto cfg = parse_config_text("rng_seed = 9\nwildcard_prob = 0.35\nngram_lengths = 3\n");
    const auto text = config_to_text(cfg);
    const auto again = parse_config_text(text);
    CHECK(config_to_text(again) == text);
    CHECK(again.lymph.wildcard_prob == 0.35);
    CHECK(config_keys().size() == 29);
}
