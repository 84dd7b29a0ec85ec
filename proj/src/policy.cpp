#include "dangerwatch/policy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

namespace {

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string quote(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

class Cursor {
public:
    Cursor(std::string_view text, std::size_t line_no) : text_(text), line_(line_no) {}

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, pos_ + 1, what); }

    std::size_t skip_ws() {
        const std::size_t start = pos_;
        while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
        return pos_ - start;
    }

    void require_ws() {
        if (skip_ws() == 0) fail("expected whitespace");
    }

    bool try_literal(std::string_view lit) {
        if (text_.substr(pos_, lit.size()) != lit) return false;
        pos_ += lit.size();
        return true;
    }

    void expect(std::string_view lit) {
        if (!try_literal(lit)) fail("expected '" + std::string(lit) + "'");
    }

    std::string token() {
        const std::size_t start = pos_;
        while (!at_end() && is_token_char(text_[pos_])) ++pos_;
        if (start == pos_) fail("expected a syscall name or keyword");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::size_t number() {
        const std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
        if (start == pos_) fail("expected an argument index");
        try {
            return static_cast<std::size_t>(std::stoull(std::string(text_.substr(start, pos_ - start))));
        } catch (const std::out_of_range&) {
            pos_ = start;
            fail("argument index out of range");
        }
    }

    std::string quoted() {
        expect("\"");
        std::string out;
        while (true) {
            if (at_end()) fail("unterminated string");
            char c = text_[pos_++];
            if (c == '"') return out;
            if (c == '\\') {
                if (at_end()) fail("dangling escape");
                c = text_[pos_++];
                if (c != '"' && c != '\\') {
                    --pos_;
                    fail("unsupported escape");
                }
            }
            out.push_back(c);
        }
    }

    Action action() {
        const std::size_t start = pos_;
        const std::string word = token();
        if (word == "permit") return Action::Permit;
        if (word == "deny") return Action::Deny;
        pos_ = start;
        fail("expected 'permit' or 'deny'");
    }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

bool is_blank_or_comment(std::string_view line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string_view::npos || line[first] == '#';
}

std::optional<DefaultAction> parse_default_line(std::string_view line, std::size_t line_no) {
    Cursor cur(line, line_no);
    cur.skip_ws();
    if (!cur.try_literal("default")) return std::nullopt;
    if (is_token_char(cur.peek())) return std::nullopt;
    cur.skip_ws();
    cur.expect("->");
    cur.require_ws();
    const std::string word = cur.token();
    DefaultAction result{};
    if (word == "permit") {
        result = DefaultAction::Permit;
    } else if (word == "deny") {
        result = DefaultAction::Deny;
    } else if (word == "ask") {
        result = DefaultAction::Ask;
    } else {
        cur.fail("expected 'permit', 'deny' or 'ask'");
    }
    cur.skip_ws();
    if (!cur.at_end()) cur.fail("trailing characters after default action");
    return result;
}

}  // namespace

const char* to_string(DefaultAction a) {
    switch (a) {
        case DefaultAction::Permit: return "permit";
        case DefaultAction::Deny: return "deny";
        case DefaultAction::Ask: return "ask";
    }
    return "ask";
}

bool is_syscall_token(std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_token_char); }

bool matches_window(const std::vector<std::string>& seq_pattern, const std::optional<ArgCondition>& arg,
                    std::span<const AntigenEvent* const> window) {
    if (seq_pattern.size() != window.size()) return false;
    for (std::size_t i = 0; i < seq_pattern.size(); ++i) {
        if (seq_pattern[i] != kWildcard && seq_pattern[i] != window[i]->syscall) return false;
    }
    if (!arg) return true;
    return std::any_of(window.begin(), window.end(), [&](const AntigenEvent* ev) {
        return arg->index < ev->args.size() && ev->args[arg->index].find(arg->substring) != std::string::npos;
    });
}

const PolicyStatement* PolicySet::first_match(std::span<const AntigenEvent* const> window) const {
    for (const auto& st : statements) {
        if (matches_window(st.seq_pattern, st.arg_condition, window)) return &st;
    }
    return nullptr;
}

DefaultAction PolicySet::evaluate(std::span<const AntigenEvent* const> window) const {
    const PolicyStatement* st = first_match(window);
    if (st == nullptr) return default_action;
    return st->action == Action::Deny ? DefaultAction::Deny : DefaultAction::Permit;
}

void validate_statement(const PolicyStatement& st) {
    if (st.seq_pattern.empty()) throw InputError("policy statement with empty sequence");
    bool concrete = false;
    for (const auto& item : st.seq_pattern) {
        if (item == kWildcard) continue;
        if (!is_syscall_token(item)) throw InputError("invalid syscall token '" + item + "'");
        concrete = true;
    }
    if (!concrete) throw InputError("policy statement sequence is all wildcards");
    if (st.arg_condition && st.arg_condition->substring.find_first_of("\r\n") != std::string::npos) {
        throw InputError("argument substring contains a line break");
    }
}

std::string emit_statement(const PolicyStatement& st) {
    std::string out = "match seq(";
    for (std::size_t i = 0; i < st.seq_pattern.size(); ++i) {
        if (i > 0) out += ", ";
        out += st.seq_pattern[i];
    }
    out += ")";
    if (st.arg_condition) {
        out += " arg " + std::to_string(st.arg_condition->index) + " substr " + quote(st.arg_condition->substring);
    }
    out += " -> ";
    out += to_string(st.action);
    return out;
}

std::string emit_policy(const PolicySet& set) {
    std::string out;
    for (const auto& st : set.statements) {
        out += emit_statement(st);
        out += '\n';
    }
    out += "default -> ";
    out += to_string(set.default_action);
    out += '\n';
    return out;
}

PolicyStatement parse_statement(std::string_view line, std::size_t line_no) {
    Cursor cur(line, line_no);
    PolicyStatement st;
    cur.skip_ws();
    cur.expect("match");
    cur.require_ws();
    cur.expect("seq(");
    while (true) {
        cur.skip_ws();
        if (cur.try_literal("*")) {
            st.seq_pattern.push_back(kWildcard);
        } else {
            st.seq_pattern.push_back(cur.token());
        }
        cur.skip_ws();
        if (cur.try_literal(")")) break;
        cur.expect(",");
    }
    if (std::all_of(st.seq_pattern.begin(), st.seq_pattern.end(), [](const auto& s) { return s == kWildcard; })) {
        cur.fail("sequence must contain at least one syscall name");
    }
    cur.require_ws();
    if (cur.try_literal("arg")) {
        cur.require_ws();
        ArgCondition cond;
        cond.index = cur.number();
        cur.require_ws();
        cur.expect("substr");
        cur.require_ws();
        cond.substring = cur.quoted();
        st.arg_condition = std::move(cond);
        cur.require_ws();
    }
    cur.expect("->");
    cur.require_ws();
    st.action = cur.action();
    cur.skip_ws();
    if (!cur.at_end()) cur.fail("trailing characters after action");
    return st;
}

PolicySet parse_policy(std::istream& in) {
    PolicySet set;
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> default_line;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        if (default_line) throw ParseError(line_no, 1, "statement after the default line");
        if (auto def = parse_default_line(line, line_no)) {
            set.default_action = *def;
            default_line = line_no;
            continue;
        }
        set.statements.push_back(parse_statement(line, line_no));
    }
    return set;
}

PolicySet parse_policy_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_policy(in);
}

PolicySet merge_policies(const PolicySet& base, std::span<const PolicyStatement> additions) {
    PolicySet merged = base;
    std::unordered_set<std::string> seen;
    for (const auto& st : merged.statements) seen.insert(emit_statement(st));
    for (const auto& st : additions) {
        if (seen.insert(emit_statement(st)).second) merged.statements.push_back(st);
    }
    return merged;
}

}  // namespace dangerwatch
