#include "reidtk/npy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <string_view>

#include "reidtk/error.hpp"
#include "reidtk/fileio.hpp"

namespace reidtk::npy {
namespace {

using Kind = FormatError::Kind;

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kPreamble = 10;  // magic + version + uint16 header length
constexpr std::size_t kAlign = 64;
// Spaces reserved so the leading dimension can grow in place, as numpy does.
constexpr std::size_t kGrowthDigits = 21;


// Minimal parser for the Python dict literal in an NPY header.
class DictParser {
 public:
  DictParser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  struct Fields {
    std::optional<std::string> descr;
    std::optional<bool> fortran_order;
    std::optional<std::vector<std::size_t>> shape;
  };

  Fields parse() {
    Fields f;
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const std::string key = parse_string();
      expect(':');
      if (key == "descr") {
        f.descr = parse_string();
      } else if (key == "fortran_order") {
        f.fortran_order = parse_bool();
      } else if (key == "shape") {
        f.shape = parse_tuple();
      } else {
        fail("unexpected header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail("expected ',' or '}' in header");
      }
    }
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected characters after header dict");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(Kind::kBadHeader, base_ + pos_, "malformed NPY header at byte " +
                                                          std::to_string(base_ + pos_) + ": " + what);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n' || text_[pos_] == '\t')) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_string() {
    skip_ws();
    const char quote = peek();
    if (quote != '\'' && quote != '"') fail("expected a quoted string");
    const std::size_t end = text_.find(quote, pos_ + 1);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string out(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return out;
  }

  bool parse_bool() {
    skip_ws();
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }

  std::vector<std::size_t> parse_tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a dimension");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        const auto digit = static_cast<std::size_t>(peek() - '0');
        if (v > (std::numeric_limits<std::size_t>::max() - digit) / 10) fail("dimension overflows");
        v = v * 10 + digit;
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ')') {
        fail("expected ',' or ')' in shape");
      }
    }
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

template <typename T>
T load_le(const std::byte* p) {
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  Bits bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) bits |= static_cast<Bits>(std::to_integer<std::uint8_t>(p[b])) << (8 * b);
  return std::bit_cast<T>(bits);
}

template <typename T>
void store_le(T value, std::vector<std::byte>& out) {
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const auto bits = std::bit_cast<Bits>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<std::byte>((bits >> (8 * b)) & 0xFF));
}

std::size_t element_size(Precision p) { return p == Precision::kFloat32 ? 4 : 8; }

}  // namespace

Header parse_header(std::span<const std::byte> bytes) {
  const std::size_t probe = std::min(bytes.size(), kMagic.size());
  for (std::size_t i = 0; i < probe; ++i) {
    if (bytes[i] != static_cast<std::byte>(kMagic[i])) {
      throw FormatError(Kind::kBadMagic, i, "not an NPY file (bad magic at byte " + std::to_string(i) + ")");
    }
  }
  if (bytes.size() < kPreamble) {
    throw FormatError(Kind::kTruncated, bytes.size(), "NPY preamble truncated at byte " + std::to_string(bytes.size()));
  }
  const auto major = std::to_integer<unsigned>(bytes[6]);
  const auto minor = std::to_integer<unsigned>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw FormatError(Kind::kUnsupportedVersion, 6,
                      "unsupported NPY version " + std::to_string(major) + "." + std::to_string(minor));
  }
  const std::size_t header_len =
      std::to_integer<std::size_t>(bytes[8]) | (std::to_integer<std::size_t>(bytes[9]) << 8);
  if (bytes.size() < kPreamble + header_len) {
    throw FormatError(Kind::kTruncated, bytes.size(), "NPY header truncated: needs " +
                                                          std::to_string(kPreamble + header_len) + " bytes");
  }
  std::string_view text(reinterpret_cast<const char*>(bytes.data() + kPreamble), header_len);
  if (text.empty() || text.back() != '\n') {
    throw FormatError(Kind::kBadHeader, kPreamble + header_len, "NPY header is not newline terminated");
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c >= 0x80 || (c < 0x20 && c != '\n' && c != '\t')) {
      throw FormatError(Kind::kBadHeader, kPreamble + i, "non-ASCII byte in NPY header");
    }
  }

  const auto fields = DictParser(text, kPreamble).parse();
  if (!fields.descr || !fields.fortran_order || !fields.shape) {
    throw FormatError(Kind::kBadHeader, kPreamble, "NPY header lacks descr, fortran_order or shape");
  }
  Header h;
  if (*fields.descr == "<f4") {
    h.precision = Precision::kFloat32;
  } else if (*fields.descr == "<f8") {
    h.precision = Precision::kFloat64;
  } else {
    throw FormatError(Kind::kUnsupportedDtype, kPreamble, "unsupported dtype '" + *fields.descr + "'");
  }
  if (*fields.fortran_order) {
    throw FormatError(Kind::kFortranOrder, kPreamble, "Fortran-ordered arrays are not supported");
  }
  if (fields.shape->size() != 2) {
    throw FormatError(Kind::kUnsupportedRank, kPreamble,
                      "expected a rank-2 array, got rank " + std::to_string(fields.shape->size()));
  }
  h.fortran_order = false;
  h.rows = (*fields.shape)[0];
  h.cols = (*fields.shape)[1];
  h.data_offset = kPreamble + header_len;
  return h;
}

Matrix read(std::span<const std::byte> bytes) {
  const Header h = parse_header(bytes);
  const std::size_t elem = element_size(h.precision);
  if (h.cols != 0 && h.rows > std::numeric_limits<std::size_t>::max() / h.cols / elem) {
    throw FormatError(Kind::kBadHeader, kPreamble, "NPY shape overflows");
  }
  const std::size_t count = h.rows * h.cols;
  const std::size_t payload = count * elem;
  const std::size_t available = bytes.size() - h.data_offset;
  if (available < payload) {
    throw FormatError(Kind::kTruncated, bytes.size(),
                      "NPY payload truncated: expected " + std::to_string(payload) + " bytes, found " +
                          std::to_string(available));
  }
  if (available > payload) {
    throw FormatError(Kind::kTrailingData, h.data_offset + payload, "trailing bytes after NPY payload");
  }
  std::vector<double> data(count);
  const std::byte* p = bytes.data() + h.data_offset;
  for (std::size_t i = 0; i < count; ++i, p += elem) {
    const double v = h.precision == Precision::kFloat32 ? static_cast<double>(load_le<float>(p)) : load_le<double>(p);
    if (!std::isfinite(v)) {
      const std::size_t at = h.data_offset + i * elem;
      throw FormatError(Kind::kNonFinite, at, "non-finite value at byte " + std::to_string(at));
    }
    data[i] = v;
  }
  return Matrix(h.rows, h.cols, std::move(data));
}

std::vector<std::byte> write(const Matrix& m, Precision precision) {
  std::string dict = "{'descr': '";
  dict += precision == Precision::kFloat32 ? "<f4" : "<f8";
  dict += "', 'fortran_order': False, 'shape': (" + std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "), }";
  const std::size_t lead_digits = std::to_string(m.rows()).size();
  if (lead_digits < kGrowthDigits) dict.append(kGrowthDigits - lead_digits, ' ');
  const std::size_t unpadded = kPreamble + dict.size() + 1;
  dict.append((kAlign - unpadded % kAlign) % kAlign, ' ');
  dict.push_back('\n');

  std::vector<std::byte> out;
  out.reserve(kPreamble + dict.size() + m.size() * element_size(precision));
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  out.push_back(std::byte{1});
  out.push_back(std::byte{0});
  out.push_back(static_cast<std::byte>(dict.size() & 0xFF));
  out.push_back(static_cast<std::byte>((dict.size() >> 8) & 0xFF));
  for (char c : dict) out.push_back(static_cast<std::byte>(c));
  for (double v : m.values()) {
    if (precision == Precision::kFloat32) {
      store_le(static_cast<float>(v), out);
    } else {
      store_le(v, out);
    }
  }
  return out;
}

Matrix read_file(const std::filesystem::path& path) {
  try {
    return read(fileio::read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), e.position(), path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const Matrix& m, Precision precision) {
  fileio::write_bytes(path, write(m, precision));
}

}  // namespace reidtk::npy
