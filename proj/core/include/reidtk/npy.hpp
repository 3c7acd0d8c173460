#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "reidtk/matrix.hpp"

/// NPY v1.0 reader/writer for rank-2 little-endian float32/float64 arrays
/// in C order.
///
/// Layout: magic "\x93NUMPY", version bytes {1, 0}, little-endian uint16
/// header length, then an ASCII dict literal
///   {'descr': '<f4', 'fortran_order': False, 'shape': (R, C), }
/// padded with spaces and terminated by '\n' so that the payload starts on a
/// 64-byte boundary.
namespace reidtk::npy {

enum class Precision { kFloat32, kFloat64 };

struct Header {
  Precision precision = Precision::kFloat32;
  bool fortran_order = false;
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Offset of the first payload byte.
  std::size_t data_offset = 0;
};

/// Parses and validates the preamble and dict. Throws FormatError.
Header parse_header(std::span<const std::byte> bytes);

/// Values are widened to double. Throws FormatError with a distinct kind for
/// each defect (magic, version, dtype, rank, order, truncation, trailing
/// bytes, non-finite values).
Matrix read(std::span<const std::byte> bytes);

std::vector<std::byte> write(const Matrix& m, Precision precision = Precision::kFloat32);

Matrix read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Matrix& m, Precision precision = Precision::kFloat32);

}  // namespace reidtk::npy
