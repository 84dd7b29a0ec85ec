#include "dangerwatch/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, const std::string& key) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw ConfigError("invalid value for '" + key + "': '" + std::string(text) + "'");
    return value;
}

std::vector<std::size_t> parse_size_list(std::string_view text, const std::string& key) {
    std::vector<std::size_t> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_number<std::size_t>(trim(text.substr(0, comma)), key));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError("'" + key + "' needs at least one value");
    return out;
}

// Shortest text that reads back to the same double.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Field {
    std::string key;
    std::function<void(EngineConfig&, std::string_view)> set;
    std::function<std::string(const EngineConfig&)> get;
};

template <typename T, typename Access>
Field number_field(std::string key, Access access) {
    return Field{key,
                 [key, access](EngineConfig& c, std::string_view v) { access(c) = parse_number<T>(v, key); },
                 [access](const EngineConfig& c) {
                     if constexpr (std::is_floating_point_v<T>) {
                         return format_double(access(c));
                     } else {
                         return std::to_string(access(c));
                     }
                 }};
}

#define DW_FIELD(T, name, member) number_field<T>(name, [](auto& c) -> auto& { return c.member; })

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f{
            DW_FIELD(std::uint64_t, "rng_seed", rng_seed),
            DW_FIELD(std::size_t, "dc_population_size", dc_population_size),
            DW_FIELD(std::size_t, "tissue_capacity", tissue_capacity),
            DW_FIELD(std::size_t, "timestamps_per_tick", timestamps_per_tick),
            DW_FIELD(double, "cpu_scale", signals.cpu_scale),
            DW_FIELD(double, "mem_scale", signals.mem_scale),
            DW_FIELD(double, "pamp_saturation", signals.pamp_saturation),
            DW_FIELD(int, "signal_window", signals.window),
            DW_FIELD(double, "w_csm_pamp", weights.csm.pamp),
            DW_FIELD(double, "w_csm_danger", weights.csm.danger),
            DW_FIELD(double, "w_csm_safe", weights.csm.safe),
            DW_FIELD(double, "w_mat_pamp", weights.mature.pamp),
            DW_FIELD(double, "w_mat_danger", weights.mature.danger),
            DW_FIELD(double, "w_mat_safe_suppression", weights.mature.safe_suppression),
            DW_FIELD(double, "w_semi_safe", weights.semi.safe),
            DW_FIELD(double, "threshold_lo", dc.threshold_lo),
            DW_FIELD(double, "threshold_hi", dc.threshold_hi),
            DW_FIELD(std::size_t, "peptide_capacity", dc.peptide_capacity),
            DW_FIELD(std::size_t, "peptides_per_collection", dc.peptides_per_collection),
            DW_FIELD(std::size_t, "antigens_per_sample", dc.antigens_per_sample),
        };
        f.push_back(Field{"ngram_lengths",
                          [](EngineConfig& c, std::string_view v) { c.dc.ngram_lengths = parse_size_list(v, "ngram_lengths"); },
                          [](const EngineConfig& c) {
                              std::string out;
                              for (std::size_t i = 0; i < c.dc.ngram_lengths.size(); ++i) {
                                  if (i > 0) out += ",";
                                  out += std::to_string(c.dc.ngram_lengths[i]);
                              }
                              return out;
                          }});
        f.push_back(DW_FIELD(double, "activation_threshold", lymph.activation_threshold));
        f.push_back(DW_FIELD(double, "tolerance_threshold", lymph.tolerance_threshold));
        f.push_back(DW_FIELD(std::int64_t, "naive_lifespan", lymph.naive_lifespan));
        f.push_back(DW_FIELD(std::size_t, "naive_per_presentation", lymph.naive_per_presentation));
        f.push_back(DW_FIELD(double, "wildcard_prob", lymph.wildcard_prob));
        f.push_back(DW_FIELD(std::int64_t, "effector_lifespan", response.effector_lifespan));
        f.push_back(DW_FIELD(std::int64_t, "memory_extension", response.memory_extension));
        f.push_back(DW_FIELD(double, "memory_fraction", response.memory_fraction));
        return f;
    }();
    return table;
}

#undef DW_FIELD

}  // namespace

void EngineConfig::finalize() {
    if (dc_population_size == 0) throw ConfigError("dc_population_size must be positive");
    if (tissue_capacity == 0) throw ConfigError("tissue_capacity must be positive");
    if (timestamps_per_tick == 0) throw ConfigError("timestamps_per_tick must be positive");
    signals.validate();
    weights.validate();
    dc.validate();
    lymph.evidence_scale = dc.evidence_scale();
    lymph.validate();
    response.validate();
}

EngineConfig parse_config(std::istream& in) {
    std::map<std::string, const Field*> by_key;
    for (const auto& f : fields()) by_key[f.key] = &f;

    EngineConfig cfg;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key(trim(body.substr(0, eq)));
        const std::string_view value = trim(body.substr(eq + 1));
        const auto it = by_key.find(key);
        if (it == by_key.end()) throw ConfigError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            it->second->set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    cfg.finalize();
    return cfg;
}

EngineConfig parse_config_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

std::string config_to_text(const EngineConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

}  // namespace dangerwatch
