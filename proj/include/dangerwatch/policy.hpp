#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dangerwatch/lymph.hpp"
#include "dangerwatch/tissue.hpp"

namespace dangerwatch {

// Policy grammar, one statement per line, '#' starts a comment line:
//
//   match seq(open, *, execve) arg 0 substr "/tmp/" -> deny
//   default -> ask
//
// Emission is canonical (single spaces, lowercase keywords, quoted substrings
// with '"' and '\' backslash-escaped), so emit(parse(emit(s))) == emit(s).

struct PolicyStatement {
    std::vector<std::string> seq_pattern;
    std::optional<ArgCondition> arg_condition;
    Action action = Action::Permit;

    friend bool operator==(const PolicyStatement&, const PolicyStatement&) = default;
};

/// `Ask` stands in for an interactive decision; it is never taken automatically.
enum class DefaultAction { Permit, Deny, Ask };

const char* to_string(DefaultAction a);

struct PolicySet {
    std::vector<PolicyStatement> statements;
    DefaultAction default_action = DefaultAction::Ask;

    friend bool operator==(const PolicySet&, const PolicySet&) = default;

    /// First matching statement, or nullptr if only the default applies.
    const PolicyStatement* first_match(std::span<const AntigenEvent* const> window) const;

    /// Total evaluation: the first match's action, else the default.
    DefaultAction evaluate(std::span<const AntigenEvent* const> window) const;
};

/// True when the window has the pattern's length, every concrete item equals
/// the event's syscall at that position, and (if present) some event's
/// argument `index` contains the substring.
bool matches_window(const std::vector<std::string>& seq_pattern, const std::optional<ArgCondition>& arg,
                    std::span<const AntigenEvent* const> window);

bool is_syscall_token(std::string_view s);

/// Throws InputError if the statement cannot be printed in the grammar.
void validate_statement(const PolicyStatement& st);

std::string emit_statement(const PolicyStatement& st);
std::string emit_policy(const PolicySet& set);

/// Parses one statement line. `line_no` is only used for error positions.
PolicyStatement parse_statement(std::string_view line, std::size_t line_no = 1);

/// Parses a whole policy file. A missing `default` line means `ask`; a
/// `default` line must be the last non-comment line.
PolicySet parse_policy(std::istream& in);
PolicySet parse_policy_text(std::string_view text);

/// Inserts statements not already present after the existing ones, in order.
/// Existing statements are never reordered or removed.
PolicySet merge_policies(const PolicySet& base, std::span<const PolicyStatement> additions);

}  // namespace dangerwatch
