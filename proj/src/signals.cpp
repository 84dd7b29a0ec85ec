#include "dangerwatch/signals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dangerwatch/error.hpp"

namespace dangerwatch {

namespace {

double clamp_concentration(double v) { return std::clamp(v, 0.0, kMaxConcentration); }

}  // namespace

void SignalConfig::validate() const {
    if (!(cpu_scale > 0.0) || !(mem_scale > 0.0) || !(pamp_saturation > 0.0) || window <= 0) {
        throw ConfigError("signal config: cpu_scale, mem_scale, pamp_saturation and window must be positive");
    }
}

ProcessSignals derive_process_signals(const MetricSample& prev, const MetricSample& cur, const SignalConfig& cfg) {
    if (prev.pid != cur.pid) {
        throw InputError("metric samples from different pids (" + std::to_string(prev.pid) + " vs " +
                         std::to_string(cur.pid) + ")");
    }
    if (prev.timestamp >= cur.timestamp) {
        throw InputError("metric samples for pid " + std::to_string(cur.pid) + " not strictly time-ordered");
    }
    const double cpu_term = std::abs(cur.cpu_pct - prev.cpu_pct) / cfg.cpu_scale;
    const double mem_term = std::abs(cur.mem_kb - prev.mem_kb) / cfg.mem_scale;
    const double danger = std::min(kMaxConcentration, kMaxConcentration * std::max(cpu_term, mem_term));
    return {danger, kMaxConcentration - danger};
}

double derive_pamp(std::int64_t violations, const SignalConfig& cfg) {
    if (violations <= 0) return 0.0;
    return std::min(kMaxConcentration, kMaxConcentration * static_cast<double>(violations) / cfg.pamp_saturation);
}

double derive_inflammation(const HostSample& host) {
    return std::min(kMaxConcentration, kMaxConcentration * host.load_avg / static_cast<double>(host.ncores));
}

SignalVector build_signal_vector(double pamp, double danger, double safe, double inflammation, Timestep timestamp) {
    if (std::isnan(pamp) || std::isnan(danger) || std::isnan(safe) || std::isnan(inflammation)) {
        throw InputError("signal vector component is NaN");
    }
    return {clamp_concentration(pamp), clamp_concentration(danger), clamp_concentration(safe),
            clamp_concentration(inflammation), timestamp};
}

}  // namespace dangerwatch
