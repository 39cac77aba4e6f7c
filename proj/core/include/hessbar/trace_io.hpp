#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hessbar/solver.hpp"

namespace hessbar {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Write via a sibling temp file and rename, so a reader never sees a partial
// artifact and a crashed writer leaves the previous version intact.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

// Header: k,f,alpha,backtracks,comp_residual,v_norm_x. One row per visited
// iterate; the terminal row carries alpha = 0 and backtracks = 0.
extern const char* const kTraceCsvHeader;

std::string trace_to_csv(std::span<const IterationRecord> trace);
void write_trace_csv(const std::filesystem::path& path,
                     std::span<const IterationRecord> trace);

// Strict inverses of the writer: exact header match, six fields per row.
// Throws ConfigError on malformed input, naming the offending line.
std::vector<IterationRecord> parse_trace_csv(const std::string& content);
std::vector<IterationRecord> read_trace_csv(const std::filesystem::path& path);

}  // namespace hessbar
