#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>

namespace microrev::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw UsageError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::string strip_spaces(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c != ' ' && c != '\t') out.push_back(c);
  }
  return out;
}

double parse_imaginary_coefficient(std::string_view text) {
  if (text.empty() || text == "+") return 1.0;
  if (text == "-") return -1.0;
  return parse_double(text);
}

}  // namespace

ComplexAmplitude parse_complex(std::string_view raw) {
  const std::string text = strip_spaces(raw);
  if (text.empty()) throw UsageError("empty complex amplitude");
  try {
    if (text.back() != 'i' && text.back() != 'j') return ComplexAmplitude(parse_double(text));
    const std::string_view body(text.data(), text.size() - 1);
    // Split at the last sign that is not a leading sign or an exponent sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
      if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
        split = k;
        break;
      }
    }
    if (split == std::string_view::npos) return ComplexAmplitude(0.0, parse_imaginary_coefficient(body));
    return ComplexAmplitude(parse_double(body.substr(0, split)), parse_imaginary_coefficient(body.substr(split)));
  } catch (const UsageError&) {
    throw UsageError("not a complex amplitude: '" + std::string(raw) + "'");
  } catch (const DomainError&) {
    throw UsageError("complex amplitude must be finite: '" + std::string(raw) + "'");
  }
}

ComplexAmplitude amplitude_from_json(const nlohmann::json& j) {
  if (j.is_number()) return ComplexAmplitude(j.get<double>());
  if (j.is_string()) return parse_complex(j.get<std::string>());
  if (j.is_object() && j.contains("re")) {
    return ComplexAmplitude(j.at("re").get<double>(), j.value("im", 0.0));
  }
  throw UsageError("amplitude must be a number, an \"a+bi\" string or {\"re\", \"im\"}: " + j.dump());
}

nlohmann::json amplitude_to_json(const ComplexAmplitude& a) { return {{"re", a.re()}, {"im", a.im()}}; }

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) os_ << ',';
    os_ << csv_escape(fields[k]);
  }
  os_ << "\r\n";
}

std::filesystem::path resolve_output_path(const std::filesystem::path& requested) {
  const char* env = std::getenv("MICROREV_OUTPUT_DIR");
  if (env == nullptr || *env == '\0') return requested;
  return std::filesystem::path(env) / requested.filename();
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& requested) {
  const char* env = std::getenv("MICROREV_OUTPUT_DIR");
  if (env == nullptr || *env == '\0') return requested;
  return env;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace microrev::cli
