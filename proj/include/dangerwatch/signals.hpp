#pragma once

#include <cstdint>

namespace dangerwatch {

using Timestep = std::int64_t;
using Pid = std::int64_t;

inline constexpr double kMaxConcentration = 100.0;

struct MetricSample {
    Timestep timestamp = 0;
    Pid pid = 0;
    double cpu_pct = 0.0;  // percent of one core, may exceed 100 on multi-threaded processes
    double mem_kb = 0.0;

    friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

struct HostSample {
    Timestep timestamp = 0;
    double load_avg = 0.0;
    int ncores = 1;

    friend bool operator==(const HostSample&, const HostSample&) = default;
};

/// Concentrations of the four input signals, each in [0, 100].
struct SignalVector {
    double pamp = 0.0;
    double danger = 0.0;
    double safe = 0.0;
    double inflammation = 0.0;
    Timestep timestamp = 0;

    friend bool operator==(const SignalVector&, const SignalVector&) = default;
};

struct SignalConfig {
    double cpu_scale = 25.0;      // cpu delta (percent) that saturates danger
    double mem_scale = 8192.0;    // memory delta (kB) that saturates danger
    double pamp_saturation = 5.0; // violations per window that saturate PAMP
    int window = 5;               // ticks over which violations are counted

    void validate() const;
};

struct ProcessSignals {
    double danger = 0.0;
    double safe = 0.0;
};

/// Danger from one-step cpu/memory fluctuation; safe is its complement.
/// Throws InputError when the samples belong to different pids or are not
/// strictly time-ordered.
ProcessSignals derive_process_signals(const MetricSample& prev, const MetricSample& cur, const SignalConfig& cfg);

double derive_pamp(std::int64_t violations, const SignalConfig& cfg);

double derive_inflammation(const HostSample& host);

/// Clamps each component into [0, 100]. NaN in any component is an InputError.
SignalVector build_signal_vector(double pamp, double danger, double safe, double inflammation, Timestep timestamp = 0);

}  // namespace dangerwatch
