#include "reidtk/fileio.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

#include "reidtk/error.hpp"

namespace reidtk::fileio {
namespace {

[[noreturn]] void io_fail(const char* action, const std::filesystem::path& path) {
  throw IoError(std::string("cannot ") + action + " '" + path.string() + "': " + std::strerror(errno));
}

}  // namespace

std::vector<std::byte> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("open", path);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) io_fail("read", path);
  std::vector<std::byte> out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("open", path);
  std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) io_fail("read", path);
  return out;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::byte>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail("create", path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) io_fail("write", path);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail("create", path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) io_fail("write", path);
}

}  // namespace reidtk::fileio
