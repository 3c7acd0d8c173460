#include "reidtk/labels.hpp"

#include <charconv>
#include <optional>
#include <vector>

#include "reidtk/error.hpp"
#include "reidtk/fileio.hpp"

namespace reidtk::labels {
namespace {

using Kind = FormatError::Kind;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

std::int64_t parse_id(std::string_view field, std::size_t line, const char* column) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || end != field.data() + field.size()) {
    throw FormatError(Kind::kBadField, line, "line " + std::to_string(line) + ": " + column + " '" +
                                                 std::string(field) + "' is not an integer");
  }
  if (v < 0) {
    throw FormatError(Kind::kBadField, line, "line " + std::to_string(line) + ": " + column + " must be >= 0");
  }
  return v;
}

}  // namespace

evalkit::SampleLabels read(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw FormatError(Kind::kEmpty, 1, "line 1: label file is empty");

  const auto header = split(lines.front());
  std::optional<std::size_t> pid_col;
  std::optional<std::size_t> cam_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "pid") pid_col = c;
    if (header[c] == "camid") cam_col = c;
  }
  if (!pid_col || !cam_col) {
    throw FormatError(Kind::kMissingColumn, 1,
                      std::string("line 1: header lacks the '") + (pid_col ? "camid" : "pid") + "' column");
  }

  evalkit::SampleLabels out;
  out.pids.reserve(lines.size() - 1);
  out.camids.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = split(lines[i]);
    if (fields.size() != header.size()) {
      throw FormatError(Kind::kBadField, line_no, "line " + std::to_string(line_no) + ": expected " +
                                                      std::to_string(header.size()) + " fields, got " +
                                                      std::to_string(fields.size()));
    }
    out.push_back(parse_id(fields[*pid_col], line_no, "pid"), parse_id(fields[*cam_col], line_no, "camid"));
  }
  return out;
}

std::string write(const evalkit::SampleLabels& labels) {
  labels.validate();
  std::string out = "pid,camid\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(labels.pids[i]);
    out += ',';
    out += std::to_string(labels.camids[i]);
    out += '\n';
  }
  return out;
}

evalkit::SampleLabels read_file(const std::filesystem::path& path) {
  try {
    return read(fileio::read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), e.position(), path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const evalkit::SampleLabels& labels) {
  fileio::write_text(path, write(labels));
}

}  // namespace reidtk::labels
