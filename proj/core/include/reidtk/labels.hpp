#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "reidtk/evalkit.hpp"

namespace reidtk::labels {

/// CSV with a header naming `pid` and `camid` (other columns are ignored),
/// LF or CRLF line endings. Throws FormatError carrying the 1-based line.
evalkit::SampleLabels read(std::string_view text);

/// "pid,camid\n" followed by one LF-terminated row per sample.
std::string write(const evalkit::SampleLabels& labels);

evalkit::SampleLabels read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const evalkit::SampleLabels& labels);

}  // namespace reidtk::labels
