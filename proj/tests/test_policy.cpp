#include "doctest.h"

#include "dangerwatch/error.hpp"
#include "dangerwatch/policy.hpp"
#include "dangerwatch/random.hpp"

using namespace dangerwatch;

namespace {

std::vector<AntigenEvent> events(std::initializer_list<const char*> names) {
    std::vector<AntigenEvent> out;
    for (const char* n : names) {
        AntigenEvent ev;
        ev.syscall = n;
        out.push_back(ev);
    }
    return out;
}

std::vector<const AntigenEvent*> ptrs(const std::vector<AntigenEvent>& evs) {
    std::vector<const AntigenEvent*> out;
    for (const auto& e : evs) out.push_back(&e);
    return out;
}

}  // namespace

TEST_CASE("statement emission") {
    const PolicyStatement deny{{"open", "*", "execve"}, std::nullopt, Action::Deny};
    CHECK(emit_statement(deny) == "match seq(open, *, execve) -> deny");

    const PolicyStatement permit{{"open", "read"}, ArgCondition{0, "/tmp/"}, Action::Permit};
    CHECK(emit_statement(permit) == "match seq(open, read) arg 0 substr \"/tmp/\" -> permit");

    const PolicyStatement escaped{{"open"}, ArgCondition{2, "a\"b\\c"}, Action::Deny};
    CHECK(emit_statement(escaped) == R"(match seq(open) arg 2 substr "a\"b\\c" -> deny)");
    CHECK(parse_statement(emit_statement(escaped)) == escaped);
}

TEST_CASE("statement parsing") {
    CHECK(parse_statement("match seq(open, *, execve) -> deny") ==
          PolicyStatement{{"open", "*", "execve"}, std::nullopt, Action::Deny});
    // Whitespace runs are accepted on input.
    CHECK(parse_statement("  match  seq( open ,read)   ->\tpermit ") ==
          PolicyStatement{{"open", "read"}, std::nullopt, Action::Permit});

    const auto bad = [](const char* line) { CHECK_THROWS_AS(parse_statement(line), ParseError); };
    bad("match seq() -> deny");
    bad("match seq(*, *) -> deny");
    bad("match seq(open) -> kill");
    bad("match seq(open) arg x substr \"a\" -> deny");
    bad("match seq(open) arg 0 substr \"abc -> deny");
    bad("match seq(open) arg 0 substr \"a\\n\" -> deny");
    bad("match seq(open)-> deny");
    bad("match seq(open) -> deny extra");
    bad("allow seq(open) -> deny");

    try {
        parse_statement("match seq(open) -> kill", 7);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
        CHECK(e.column() == 20);
    }
}

TEST_CASE("policy files") {
    const std::string text =
        "# base policy\n"
        "match seq(open, read) -> permit\n"
        "\n"
        "   # indented comment\n"
        "match seq(execve) arg 0 substr \"/bin/\" -> deny\n"
        "default -> deny\n";
    const auto set = parse_policy_text(text);
    CHECK(set.statements.size() == 2);
    CHECK(set.default_action == DefaultAction::Deny);
    CHECK(emit_policy(set) ==
          "match seq(open, read) -> permit\nmatch seq(execve) arg 0 substr \"/bin/\" -> deny\ndefault -> deny\n");
    CHECK(parse_policy_text(emit_policy(set)) == set);

    CHECK(parse_policy_text("").default_action == DefaultAction::Ask);
    CHECK(parse_policy_text("match seq(a) -> deny\n").default_action == DefaultAction::Ask);
    CHECK(parse_policy_text("default -> permit").default_action == DefaultAction::Permit);
    CHECK_THROWS_AS(parse_policy_text("default -> ask\nmatch seq(a) -> deny\n"), ParseError);
    CHECK_THROWS_AS(parse_policy_text("default -> maybe\n"), ParseError);
    CHECK_THROWS_AS(parse_policy_text("default -> ask\ndefault -> deny\n"), ParseError);

    try {
        parse_policy_text("match seq(a) -> deny\n\nmatch seq(b) => deny\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("first-match evaluation is total") {
    PolicySet set;
    set.statements = {
        {{"open", "*"}, std::nullopt, Action::Permit},
        {{"open", "read"}, std::nullopt, Action::Deny},
        {{"*", "write"}, ArgCondition{0, "/tmp/"}, Action::Deny},
    };
    set.default_action = DefaultAction::Ask;

    const auto open_read = events({"open", "read"});
    CHECK(set.evaluate(ptrs(open_read)) == DefaultAction::Permit);
    CHECK(set.first_match(ptrs(open_read)) == &set.statements[0]);

    auto tmp_write = events({"close", "write"});
    CHECK(set.evaluate(ptrs(tmp_write)) == DefaultAction::Ask);
    tmp_write[1].args = {"/tmp/x"};
    CHECK(set.evaluate(ptrs(tmp_write)) == DefaultAction::Deny);
    tmp_write[1].args = {"x", "/tmp/x"};
    CHECK(set.evaluate(ptrs(tmp_write)) == DefaultAction::Ask);

    const auto three = events({"open", "read", "write"});
    CHECK(set.first_match(ptrs(three)) == nullptr);
}

TEST_CASE("merging learned statements") {
    const PolicyStatement a{{"a"}, std::nullopt, Action::Permit};
    const PolicyStatement b{{"b"}, std::nullopt, Action::Deny};
    const PolicyStatement c{{"c", "*"}, ArgCondition{0, "/x/"}, Action::Deny};

    const auto single = merge_policies(PolicySet{}, std::vector<PolicyStatement>{a});
    CHECK(single.statements == std::vector<PolicyStatement>{a});
    CHECK(single.default_action == DefaultAction::Ask);

    CHECK(merge_policies(PolicySet{}, std::vector<PolicyStatement>{a, a}).statements.size() == 1);

    PolicySet base;
    base.statements = {b, a};
    base.default_action = DefaultAction::Deny;
    const auto merged = merge_policies(base, std::vector<PolicyStatement>{c, a, PolicyStatement{{"d"}, {}, Action::Permit}});
    REQUIRE(merged.statements.size() == 4);
    CHECK(merged.statements[0] == b);
    CHECK(merged.statements[1] == a);
    CHECK(merged.statements[2] == c);
    CHECK(merged.default_action == DefaultAction::Deny);
    CHECK(merge_policies(merged, std::vector<PolicyStatement>{c, a}) == merged);
}

TEST_CASE("statement validation") {
    CHECK_NOTHROW(validate_statement({{"open", "*"}, std::nullopt, Action::Deny}));
    CHECK_THROWS_AS(validate_statement({{}, std::nullopt, Action::Deny}), InputError);
    CHECK_THROWS_AS(validate_statement({{"*"}, std::nullopt, Action::Deny}), InputError);
    CHECK_THROWS_AS(validate_statement({{"op en"}, std::nullopt, Action::Deny}), InputError);
    CHECK_THROWS_AS(validate_statement({{"open"}, ArgCondition{0, "a\nb"}, Action::Deny}), InputError);
}
