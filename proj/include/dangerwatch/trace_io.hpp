#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dangerwatch/signals.hpp"
#include "dangerwatch/tissue.hpp"

namespace dangerwatch {

using Record = std::variant<AntigenEvent, MetricSample, HostSample>;

Timestep record_timestamp(const Record& r);

// Canonical trace lines, fields separated by TAB:
//   S  ts  pid  name  arg0|arg1|...  [V]     syscall, V marks a policy violation
//   M  ts  pid  cpu_pct  mem_kb              process metrics
//   H  ts  load_avg  ncores                  host load

/// Parses one canonical trace line. Throws ParseError (line_no, column of the
/// offending field) on an unknown tag, wrong arity or bad number.
Record parse_trace_line(std::string_view line, std::size_t line_no = 1);

std::string format_trace_line(const Record& r);

/// Metrics-file line: `ts pid cpu_pct mem_kb` or `ts HOST load_avg ncores`.
std::variant<MetricSample, HostSample> parse_metrics_line(std::string_view line, std::size_t line_no = 1);

std::string format_metrics_line(const std::variant<MetricSample, HostSample>& r);

/// Reads every non-blank, non-'#' line. Timestamps must not decrease.
std::vector<Record> read_trace(std::istream& in);
std::vector<Record> read_metrics(std::istream& in);

struct StraceConversion {
    std::vector<std::string> lines;
    std::size_t skipped = 0;
};

/// Converts `epoch_ts pid name(args...) = ret` lines into canonical `S`
/// lines carrying the syscall name and its first argument. The tick is the
/// epoch timestamp divided by tick_seconds, floored. Unfinished/resumed
/// halves, signal and exit notices, and anything unparseable are skipped and
/// counted.
StraceConversion adapt_strace(std::istream& in, double tick_seconds = 1.0);
StraceConversion adapt_strace_lines(const std::vector<std::string>& raw, double tick_seconds = 1.0);

}  // namespace dangerwatch
