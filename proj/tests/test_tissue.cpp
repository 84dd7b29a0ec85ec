#include "doctest.h"

#include <array>

#include "dangerwatch/error.hpp"
#include "dangerwatch/tissue.hpp"

using namespace dangerwatch;

namespace {

AntigenEvent event(Timestep ts, const std::string& name, Pid pid = 1) {
    AntigenEvent ev;
    ev.timestamp = ts;
    ev.pid = pid;
    ev.syscall = name;
    return ev;
}

}  // namespace

TEST_CASE("ingest assigns ids and bounds the buffer") {
    TissueStore store(3);
    CHECK(store.ingest_syscall(event(0, "open")) == 0);
    CHECK(store.size() == 1);

    store.ingest_syscall(event(0, "read"));
    store.ingest_syscall(event(0, "write"));
    store.ingest_syscall(event(0, "close"));
    CHECK(store.size() == 3);
    CHECK(store.buffer().front().syscall == "read");
    CHECK(store.buffer().back().id == 3);

    TissueStore big(1000);
    for (AntigenId i = 0; i < 100; ++i) CHECK(big.ingest_syscall(event(0, "x")) == i);
}

TEST_CASE("eviction is strictly oldest first") {
    TissueStore store(5);
    for (int i = 0; i < 50; ++i) {
        store.ingest_syscall(event(0, "e" + std::to_string(i)));
        CHECK(store.size() <= 5);
        CHECK(store.buffer().back().syscall == "e" + std::to_string(i));
        for (std::size_t k = 1; k < store.size(); ++k) CHECK(store.buffer()[k].id == store.buffer()[k - 1].id + 1);
    }
}

TEST_CASE("timestamp regression and empty names are rejected") {
    TissueStore store;
    store.advance();
    store.advance();
    CHECK_THROWS_AS(store.ingest_syscall(event(1, "open")), InputError);
    CHECK_NOTHROW(store.ingest_syscall(event(2, "open")));
    CHECK_THROWS_AS(store.ingest_syscall(event(5, "")), InputError);
    CHECK_THROWS_AS(TissueStore(0), ConfigError);
}

TEST_CASE("signal storage is last-writer per pid") {
    TissueStore store;
    const SignalVector a{1, 2, 3, 4, 0};
    const SignalVector b{5, 6, 7, 8, 0};
    store.ingest_signals(9, a);
    CHECK(store.current_signals().at(9) == a);
    store.ingest_signals(9, b);
    CHECK(store.current_signals().at(9) == b);
    store.ingest_signals(10, a);
    CHECK(store.current_signals().at(9) == b);
    CHECK(store.current_signals().at(10) == a);

    const auto mean = store.pooled_signals();
    CHECK(mean.pamp == doctest::Approx(3.0));
    CHECK(mean.inflammation == doctest::Approx(6.0));
}

TEST_CASE("sampling with replacement") {
    Rng rng(5);
    TissueStore store;
    CHECK(store.sample_antigens(rng, 5).empty());

    store.ingest_syscall(event(0, "only"));
    const auto three = store.sample_antigens(rng, 3);
    REQUIRE(three.size() == 3);
    for (const auto& ev : three) CHECK(ev.syscall == "only");

    TissueStore ten;
    for (int i = 0; i < 10; ++i) ten.ingest_syscall(event(0, "s" + std::to_string(i)));

    // Reference draws: each sample is buffer[rng.index(10)] from a same-seeded stream.
    Rng reference(1234);
    std::vector<AntigenId> expected;
    for (int i = 0; i < 4; ++i) expected.push_back(reference.index(10));
    CHECK(expected == std::vector<AntigenId>{2, 8, 0, 4});

    Rng seeded(1234);
    const auto drawn = ten.sample_antigens(seeded, 4);
    std::vector<AntigenId> ids;
    for (const auto& ev : drawn) ids.push_back(ev.id);
    CHECK(ids == expected);

    Rng again(1234);
    const auto redrawn = ten.sample_antigens(again, 4);
    CHECK(redrawn == drawn);
}

TEST_CASE("sampling is uniform (chi-square, 99% band)") {
    TissueStore store;
    for (int i = 0; i < 10; ++i) store.ingest_syscall(event(0, "s"));
    Rng rng(99);
    std::array<int, 10> counts{};
    const int draws = 20000;
    for (const auto& ev : store.sample_antigens(rng, draws)) ++counts[ev.id];
    const double expected = draws / 10.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // chi-square(9) upper 1% critical value
    CHECK(chi2 < 21.666);
}

TEST_CASE("fragments follow the anchor's pid") {
    TissueStore store;
    store.ingest_syscall(event(0, "a", 1));
    store.ingest_syscall(event(0, "x", 2));
    store.ingest_syscall(event(0, "b", 1));
    store.ingest_syscall(event(0, "c", 1));
    store.ingest_syscall(event(0, "d", 1));
    Rng rng(1);
    for (const auto& frag : store.sample_fragments(rng, 50, 3)) {
        REQUIRE(!frag.empty());
        CHECK(frag.size() <= 3);
        for (const auto& ev : frag) CHECK(ev.pid == frag.front().pid);
        for (std::size_t k = 1; k < frag.size(); ++k) CHECK(frag[k].id > frag[k - 1].id);
        if (frag.front().syscall == "a") {
            CHECK(frag.size() == 3);
            CHECK(frag[1].syscall == "b");
        }
    }
}

TEST_CASE("clock advances by one") {
    TissueStore store;
    CHECK(store.clock() == 0);
    CHECK(store.advance() == 1);
    for (int k = 1; k < 10; ++k) {
        const auto before = store.clock();
        CHECK(store.advance() == before + 1);
    }
    CHECK(store.clock() == 10);
}
