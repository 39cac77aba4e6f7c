#include "hessbar/trace_io.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <string_view>
#include <system_error>

#include "hessbar/errors.hpp"

namespace hessbar {

const char* const kTraceCsvHeader = "k,f,alpha,backtracks,comp_residual,v_norm_x";

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  static std::atomic<unsigned> counter{0};
  const unsigned tag = counter.fetch_add(1, std::memory_order_relaxed);
  std::filesystem::path temp = path;
  temp += ".tmp" + std::to_string(tag);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + temp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(temp, ignored);
      throw ConfigError("write failed: " + temp.string());
    }
  }
  std::filesystem::rename(temp, path);  // atomic within a filesystem
}

std::string trace_to_csv(std::span<const IterationRecord> trace) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (const IterationRecord& rec : trace) {
    out += std::to_string(rec.k);
    out += ',';
    out += format_double(rec.f_value);
    out += ',';
    out += format_double(rec.step_alpha);
    out += ',';
    out += std::to_string(rec.backtracks);
    out += ',';
    out += format_double(rec.complementarity_residual);
    out += ',';
    out += format_double(rec.v_norm_x);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const std::filesystem::path& path,
                     std::span<const IterationRecord> trace) {
  write_text_atomic(path, trace_to_csv(trace));
}

namespace {

[[noreturn]] void bad_line(std::size_t line_number, const std::string& why) {
  throw ConfigError("trace csv, line " + std::to_string(line_number) + ": " + why);
}

double parse_double_field(std::string_view field, std::size_t line_number) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    bad_line(line_number, "bad numeric field '" + std::string(field) + "'");
  return value;
}

std::int64_t parse_int_field(std::string_view field, std::size_t line_number) {
  std::int64_t value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    bad_line(line_number, "bad integer field '" + std::string(field) + "'");
  return value;
}

}  // namespace

std::vector<IterationRecord> parse_trace_csv(const std::string& content) {
  std::vector<IterationRecord> trace;
  std::string_view rest = content;
  std::size_t line_number = 0;
  bool saw_header = false;
  while (!rest.empty()) {
    ++line_number;
    const std::size_t eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = (eol == std::string_view::npos) ? std::string_view{} : rest.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (rest.empty()) break;  // trailing newline
      bad_line(line_number, "empty line");
    }
    if (!saw_header) {
      if (line != kTraceCsvHeader)
        bad_line(line_number, "expected header '" + std::string(kTraceCsvHeader) + "'");
      saw_header = true;
      continue;
    }
    std::string_view fields[6];
    std::size_t count = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      if (count >= 6) bad_line(line_number, "too many fields");
      fields[count++] = line.substr(0, comma);
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (count != 6) bad_line(line_number, "expected 6 fields, got " + std::to_string(count));
    IterationRecord rec;
    rec.k = parse_int_field(fields[0], line_number);
    rec.f_value = parse_double_field(fields[1], line_number);
    rec.step_alpha = parse_double_field(fields[2], line_number);
    rec.backtracks = static_cast<int>(parse_int_field(fields[3], line_number));
    rec.complementarity_residual = parse_double_field(fields[4], line_number);
    rec.v_norm_x = parse_double_field(fields[5], line_number);
    trace.push_back(rec);
  }
  if (!saw_header) throw ConfigError("trace csv: empty input");
  return trace;
}

std::vector<IterationRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace csv: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_trace_csv(content);
}

}  // namespace hessbar
