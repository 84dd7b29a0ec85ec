#include "doctest.h"

#include <algorithm>
#include <limits>

#include "dangerwatch/error.hpp"
#include "dangerwatch/lymph.hpp"

using namespace dangerwatch;

namespace {

Peptide peptide(std::vector<std::string> ngram, std::optional<std::string> arg = std::nullopt) {
    return Peptide{std::move(ngram), std::move(arg), {1}};
}

NaiveTCell cell(TCR tcr, std::uint64_t id = 0, std::int64_t lifespan = 50) {
    return NaiveTCell{id, std::move(tcr), 0.0, 0.0, 0, lifespan};
}

MigratedDC migrated(DcContext ctx, double csm, double mat, double semi, std::vector<Peptide> peptides) {
    return MigratedDC{0, ctx, csm, semi, mat, std::move(peptides)};
}

}  // namespace

TEST_CASE("naive T-cell generation") {
    Rng rng(5);
    LymphConfig cfg;
    std::uint64_t next_id = 0;
    const std::set<TCR> none;

    CHECK(generate_naive_tcells(rng, {}, cfg, none, next_id).empty());

    cfg.wildcard_prob = 0.0;
    const std::vector<Peptide> orw{peptide({"open", "read", "write"})};
    const auto exact = generate_naive_tcells(rng, orw, cfg, none, next_id);
    REQUIRE(exact.size() == 1);  // the second candidate duplicates the first
    CHECK(exact[0].tcr.seq_pattern == std::vector<std::string>{"open", "read", "write"});
    CHECK_FALSE(exact[0].tcr.arg_pattern.has_value());
    CHECK(exact[0].lifespan == cfg.naive_lifespan);
    CHECK(next_id == 1);

    // Already live -> discarded.
    const std::set<TCR> live{exact[0].tcr};
    CHECK(generate_naive_tcells(rng, orw, cfg, live, next_id).empty());

    const std::vector<Peptide> with_arg{peptide({"open", "read"}, "/etc/")};
    const auto arg_cells = generate_naive_tcells(rng, with_arg, cfg, none, next_id);
    REQUIRE(arg_cells.size() == 1);
    REQUIRE(arg_cells[0].tcr.arg_pattern.has_value());
    CHECK(arg_cells[0].tcr.arg_pattern->index == 0);
    CHECK(arg_cells[0].tcr.arg_pattern->substring == "/etc/");
}

TEST_CASE("full wildcarding still leaves a concrete position") {
    Rng rng(6);
    LymphConfig cfg;
    cfg.wildcard_prob = 1.0;
    cfg.naive_per_presentation = 50;
    std::uint64_t next_id = 0;
    const std::vector<Peptide> ps{peptide({"a", "b", "c", "d", "e"}), peptide({"x", "y", "z"})};
    const auto cells = generate_naive_tcells(rng, ps, cfg, {}, next_id);
    CHECK_FALSE(cells.empty());
    for (const auto& c : cells) {
        const auto concrete = std::count_if(c.tcr.seq_pattern.begin(), c.tcr.seq_pattern.end(),
                                            [](const std::string& s) { return s != kWildcard; });
        CHECK(concrete >= 1);
    }

    cfg.wildcard_prob = 0.5;
    Rng rng2(7);
    for (const auto& c : generate_naive_tcells(rng2, ps, cfg, {}, next_id)) {
        CHECK(std::any_of(c.tcr.seq_pattern.begin(), c.tcr.seq_pattern.end(),
                          [](const std::string& s) { return s != kWildcard; }));
    }
}

TEST_CASE("TCR matching") {
    const TCR owc{{"open", "*", "write"}, std::nullopt};
    CHECK(match_tcr(owc, peptide({"open", "read", "write"})));
    CHECK_FALSE(match_tcr(owc, peptide({"open", "read", "close"})));
    CHECK_FALSE(match_tcr(owc, peptide({"open", "read", "write", "a", "b"})));

    const TCR with_arg{{"open", "*", "write"}, ArgCondition{0, "/etc/"}};
    CHECK(match_tcr(with_arg, peptide({"open", "read", "write"}, "/etc/")));
    CHECK(match_tcr(with_arg, peptide({"open", "x", "write"}, "/var/etc/")));
    CHECK_FALSE(match_tcr(with_arg, peptide({"open", "read", "write"}, "/tmp/")));
    CHECK_FALSE(match_tcr(with_arg, peptide({"open", "read", "write"})));

    // Reflexive on wildcard-free TCRs built from their own peptide.
    Rng rng(1);
    LymphConfig cfg;
    cfg.wildcard_prob = 0.0;
    std::uint64_t id = 0;
    const std::vector<std::string> names{"open", "read", "write", "close", "mmap"};
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> ngram;
        const auto len = 2 + rng.index(7);
        for (std::size_t k = 0; k < len; ++k) ngram.push_back(names[rng.index(names.size())]);
        std::optional<std::string> arg;
        if (rng.bernoulli(0.5)) arg = "/p" + std::to_string(i) + "/";
        const std::vector<Peptide> p{peptide(ngram, arg)};
        const auto cells = generate_naive_tcells(rng, p, cfg, {}, id);
        REQUIRE(cells.size() == 1);
        CHECK(match_tcr(cells[0].tcr, p[0]));
    }
}

TEST_CASE("presentation") {
    LymphConfig cfg;  // evidence scale 100
    std::vector<NaiveTCell> pop{cell({{"a", "b", "c"}, std::nullopt}, 0), cell({{"x", "*", "z"}, std::nullopt}, 1)};

    SUBCASE("no match leaves the population unchanged") {
        const auto mdc = migrated(DcContext::Mature, 100, 20, 0, {peptide({"q", "r", "s"})});
        CHECK(present(mdc, pop, cfg) == 0);
        for (const auto& c : pop) {
            CHECK(c.activation == 0.0);
            CHECK(c.tolerance == 0.0);
        }
    }
    SUBCASE("mature presentation adds activation") {
        const auto mdc = migrated(DcContext::Mature, 100, 20, 0, {peptide({"a", "b", "c"})});
        CHECK(present(mdc, pop, cfg) == 1);
        CHECK(pop[0].activation == doctest::Approx(20.0));
        CHECK(pop[0].tolerance == 0.0);
        CHECK(pop[1].activation == 0.0);
    }
    SUBCASE("semi-mature presentation adds tolerance scaled by csm") {
        const auto mdc = migrated(DcContext::SemiMature, 150, 0, 10, {peptide({"x", "y", "z"}), peptide({"x", "q", "z"})});
        CHECK(present(mdc, pop, cfg) == 1);
        CHECK(pop[1].tolerance == doctest::Approx(15.0));
        CHECK(pop[1].activation == 0.0);
    }
}

TEST_CASE("presentation exclusivity property") {
    Rng rng(12);
    LymphConfig cfg;
    const std::vector<std::string> names{"a", "b", "c"};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<NaiveTCell> pop;
        for (int i = 0; i < 10; ++i) {
            TCR t;
            for (int k = 0; k < 2; ++k) t.seq_pattern.push_back(rng.bernoulli(0.3) ? kWildcard : names[rng.index(3)]);
            if (t.seq_pattern[0] == kWildcard && t.seq_pattern[1] == kWildcard) t.seq_pattern[0] = "a";
            pop.push_back(cell(t, i));
            pop.back().activation = rng.uniform(0, 50);
            pop.back().tolerance = rng.uniform(0, 50);
        }
        const auto before = pop;
        std::vector<Peptide> ps;
        for (int k = 0; k < 3; ++k) ps.push_back(peptide({names[rng.index(3)], names[rng.index(3)]}));
        const auto ctx = rng.bernoulli(0.5) ? DcContext::Mature : DcContext::SemiMature;
        present(migrated(ctx, rng.uniform(50, 150), rng.uniform(0, 100), rng.uniform(0, 100), ps), pop, cfg);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (ctx == DcContext::SemiMature) CHECK(pop[i].activation == before[i].activation);
            if (ctx == DcContext::Mature) CHECK(pop[i].tolerance == before[i].tolerance);
        }
    }
}

TEST_CASE("aging and differentiation") {
    LymphConfig cfg;

    SUBCASE("activation at threshold gives a deny effector") {
        auto c = cell({{"a", "b"}, std::nullopt}, 4);
        c.activation = cfg.activation_threshold;
        const auto d = age_and_differentiate({c}, cfg, 200);
        REQUIRE(d.effectors.size() == 1);
        CHECK(d.effectors[0].action == Action::Deny);
        CHECK(d.effectors[0].id == 4);
        CHECK(d.effectors[0].lifespan == 200);
        CHECK(d.effectors[0].age == 0);
    }
    SUBCASE("tolerance at threshold gives a permit effector") {
        auto c = cell({{"a", "b"}, std::nullopt});
        c.tolerance = cfg.tolerance_threshold;
        const auto d = age_and_differentiate({c}, cfg, 200);
        REQUIRE(d.effectors.size() == 1);
        CHECK(d.effectors[0].action == Action::Permit);
    }
    SUBCASE("lifespan expiry deletes") {
        auto c = cell({{"a", "b"}, std::nullopt}, 0, 5);
        c.age = 4;
        c.activation = 10;
        const auto d = age_and_differentiate({c}, cfg, 200);
        CHECK(d.effectors.empty());
        CHECK(d.survivors.empty());
        CHECK(d.deleted.size() == 1);
    }
    SUBCASE("double crossing: larger ratio wins") {
        auto c = cell({{"a", "b"}, std::nullopt});
        c.activation = 1.2 * cfg.activation_threshold;
        c.tolerance = 1.5 * cfg.tolerance_threshold;
        CHECK(age_and_differentiate({c}, cfg, 10).effectors.at(0).action == Action::Permit);
        c.activation = 2.0 * cfg.activation_threshold;
        CHECK(age_and_differentiate({c}, cfg, 10).effectors.at(0).action == Action::Deny);
        c.activation = c.tolerance = 1.5 * cfg.activation_threshold;
        CHECK(age_and_differentiate({c}, cfg, 10).effectors.at(0).action == Action::Permit);
    }
    SUBCASE("survivors age by one") {
        const auto d = age_and_differentiate({cell({{"a", "b"}, std::nullopt})}, cfg, 10);
        REQUIRE(d.survivors.size() == 1);
        CHECK(d.survivors[0].age == 1);
    }
}

TEST_CASE("differentiation conservation and lifespan bound") {
    Rng rng(21);
    LymphConfig cfg;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<NaiveTCell> pop;
        const auto n = rng.index(30);
        for (std::size_t i = 0; i < n; ++i) {
            auto c = cell({{"a", "b"}, std::nullopt}, i, 1 + static_cast<std::int64_t>(rng.index(10)));
            c.age = static_cast<std::int64_t>(rng.index(static_cast<std::size_t>(c.lifespan)));
            c.activation = rng.uniform(0, 150);
            c.tolerance = rng.uniform(0, 150);
            pop.push_back(c);
        }
        const auto d = age_and_differentiate(pop, cfg, 10);
        CHECK(d.effectors.size() + d.survivors.size() + d.deleted.size() == n);
        for (const auto& s : d.survivors) CHECK(s.age < s.lifespan);
    }
}

TEST_CASE("infinite thresholds restrict the effector kind") {
    Rng rng(2);
    LymphConfig no_act;
    no_act.activation_threshold = std::numeric_limits<double>::infinity();
    LymphConfig no_tol;
    no_tol.tolerance_threshold = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 500; ++i) {
        auto c = cell({{"a", "b"}, std::nullopt});
        c.activation = rng.uniform(0, 1e6);
        c.tolerance = rng.uniform(0, 1e6);
        for (const auto& e : age_and_differentiate({c}, no_act, 10).effectors) CHECK(e.action == Action::Permit);
        for (const auto& e : age_and_differentiate({c}, no_tol, 10).effectors) CHECK(e.action == Action::Deny);
    }
}

TEST_CASE("lymph config validation") {
    LymphConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.naive_lifespan = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = LymphConfig{};
    cfg.wildcard_prob = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
