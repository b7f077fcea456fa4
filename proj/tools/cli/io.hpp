#pragma once

// Text plumbing shared by the subcommands: locale-free number formatting,
// complex-amplitude parsing, RFC 4180 CSV output and output-path resolution.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "microrev/types.hpp"

namespace microrev::cli {

/// Bad flag, bad config or a value outside an operation's domain (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// Parses "a", "a+bi", "a-bi", "bi", "i", "-i" (also with 'j'). Throws UsageError.
ComplexAmplitude parse_complex(std::string_view text);
/// Locale-free strict double parse. Throws UsageError.
double parse_double(std::string_view text);

/// Accepts a JSON number, an "a+bi" string or {"re": ..., "im": ...}.
ComplexAmplitude amplitude_from_json(const nlohmann::json& j);
nlohmann::json amplitude_to_json(const ComplexAmplitude& a);

/// JSON number, or null when x is not finite.
nlohmann::json number_or_null(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  /// Writes one record terminated by CRLF, quoting fields that need it.
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

std::string csv_escape(std::string_view field);

/// MICROREV_OUTPUT_DIR, when set and non-empty, replaces the directory part
/// of `requested` (the file name is kept).
std::filesystem::path resolve_output_path(const std::filesystem::path& requested);
std::filesystem::path resolve_output_dir(const std::filesystem::path& requested);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace microrev::cli
