#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "reidtk/error.hpp"
#include "reidtk/fileio.hpp"
#include "reidtk/labels.hpp"
#include "reidtk/npy.hpp"
#include "reidtk/report.hpp"

namespace reidtk {
namespace {

using Kind = FormatError::Kind;

std::vector<std::byte> from_hex(std::string_view hex) {
  std::vector<std::byte> out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<std::byte>(std::stoi(std::string(hex.substr(i, 2)), nullptr, 16)));
  }
  return out;
}

std::vector<std::byte> bytes_of(std::string_view s) {
  std::vector<std::byte> out;
  for (char c : s) out.push_back(static_cast<std::byte>(c));
  return out;
}

// np.save(f, np.array([[1, 2]], dtype='<f4'))
constexpr std::string_view kNumpyF4 =
    "934e554d5059010076007b276465736372273a20273c6634272c2027666f727472616e5f6f72646572273a2046616c73652c2027"
    "7368617065273a2028312c2032292c207d2020202020202020202020202020202020202020202020202020202020202020202020"
    "20202020202020202020202020202020202020202020200a0000803f00000040";

// np.save(f, np.array([[0.5, -2.25], [1e-3, 3]], dtype='<f8'))
constexpr std::string_view kNumpyF8 =
    "934e554d5059010076007b276465736372273a20273c6638272c2027666f727472616e5f6f72646572273a2046616c73652c2027"
    "7368617065273a2028322c2032292c207d2020202020202020202020202020202020202020202020202020202020202020202020"
    "20202020202020202020202020202020202020202020200a000000000000e03f00000000000002c0fca9f1d24d62503f00000000"
    "00000840";

// np.save(f, np.zeros((123456, 0), dtype='<f8'))
constexpr std::string_view kNumpyWideRows =
    "934e554d5059010076007b276465736372273a20273c6638272c2027666f727472616e5f6f72646572273a2046616c73652c2027"
    "7368617065273a20283132333435362c2030292c207d202020202020202020202020202020202020202020202020202020202020"
    "20202020202020202020202020202020202020202020200a";

std::vector<std::byte> make_npy(std::string_view dict, std::size_t payload_bytes = 0, unsigned major = 1) {
  std::string header(dict);
  header.push_back('\n');
  std::vector<std::byte> out = bytes_of("\x93NUMPY");
  out.push_back(static_cast<std::byte>(major));
  out.push_back(std::byte{0});
  out.push_back(static_cast<std::byte>(header.size() & 0xFF));
  out.push_back(static_cast<std::byte>(header.size() >> 8));
  for (char c : header) out.push_back(static_cast<std::byte>(c));
  out.resize(out.size() + payload_bytes, std::byte{0});
  return out;
}

Kind kind_of(const std::vector<std::byte>& bytes) {
  try {
    npy::read(bytes);
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a FormatError";
  return Kind::kEmpty;
}

TEST(Npy, WriterMatchesNumpyBytes) {
  EXPECT_EQ(npy::write(Matrix::from_rows({{1, 2}})), from_hex(kNumpyF4));
  EXPECT_EQ(npy::write(Matrix::from_rows({{0.5, -2.25}, {1e-3, 3}}), npy::Precision::kFloat64), from_hex(kNumpyF8));
  EXPECT_EQ(npy::write(Matrix(123456, 0), npy::Precision::kFloat64), from_hex(kNumpyWideRows));
}

TEST(Npy, ReadsNumpyBytes) {
  EXPECT_EQ(npy::read(from_hex(kNumpyF4)), Matrix::from_rows({{1, 2}}));
  EXPECT_EQ(npy::read(from_hex(kNumpyF8)), Matrix::from_rows({{0.5, -2.25}, {1e-3, 3}}));
  const Matrix wide = npy::read(from_hex(kNumpyWideRows));
  EXPECT_EQ(wide.rows(), 123456u);
  EXPECT_EQ(wide.cols(), 0u);
}

TEST(Npy, HeaderIsAlignedAndDescribed) {
  for (std::size_t rows : {0u, 1u, 9u, 10u, 99999u}) {
    for (auto p : {npy::Precision::kFloat32, npy::Precision::kFloat64}) {
      const auto bytes = npy::write(Matrix(rows, rows == 0 ? 0 : 1), p);
      const auto h = npy::parse_header(bytes);
      EXPECT_EQ(h.data_offset % 64, 0u);
      EXPECT_EQ(h.rows, rows);
      EXPECT_EQ(h.precision, p);
      const std::string text(reinterpret_cast<const char*>(bytes.data()) + 10, h.data_offset - 10);
      EXPECT_NE(text.find(p == npy::Precision::kFloat32 ? "'<f4'" : "'<f8'"), std::string::npos);
    }
  }
  EXPECT_EQ(npy::write(Matrix()).size(), 128u);
}

TEST(Npy, RoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> dim(0, 20);
  std::normal_distribution<double> value(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix m(dim(rng), dim(rng));
    for (double& v : m.values()) v = value(rng);
    EXPECT_EQ(npy::read(npy::write(m, npy::Precision::kFloat64)), m);
    Matrix narrowed = m;
    for (double& v : narrowed.values()) v = static_cast<double>(static_cast<float>(v));
    EXPECT_EQ(npy::read(npy::write(m)), narrowed);
  }
}

TEST(Npy, DistinctErrorKinds) {
  const std::string_view ok = "{'descr': '<f4', 'fortran_order': False, 'shape': (1, 2), }";
  EXPECT_NO_THROW(npy::read(make_npy(ok, 8)));

  auto bad_magic = make_npy(ok, 8);
  bad_magic[1] = std::byte{'X'};
  EXPECT_EQ(kind_of(bad_magic), Kind::kBadMagic);
  EXPECT_EQ(kind_of(bytes_of("hello")), Kind::kBadMagic);
  EXPECT_EQ(kind_of({}), Kind::kTruncated);
  EXPECT_EQ(kind_of(make_npy(ok, 8, 2)), Kind::kUnsupportedVersion);
  EXPECT_EQ(kind_of(make_npy("{'descr': '>f4', 'fortran_order': False, 'shape': (1, 2), }", 8)),
            Kind::kUnsupportedDtype);
  EXPECT_EQ(kind_of(make_npy("{'descr': '<i8', 'fortran_order': False, 'shape': (1, 2), }", 16)),
            Kind::kUnsupportedDtype);
  EXPECT_EQ(kind_of(make_npy("{'descr': '<f4', 'fortran_order': False, 'shape': (2,), }", 8)),
            Kind::kUnsupportedRank);
  EXPECT_EQ(kind_of(make_npy("{'descr': '<f4', 'fortran_order': False, 'shape': (1, 1, 2), }", 8)),
            Kind::kUnsupportedRank);
  EXPECT_EQ(kind_of(make_npy("{'descr': '<f4', 'fortran_order': True, 'shape': (1, 2), }", 8)),
            Kind::kFortranOrder);
  EXPECT_EQ(kind_of(make_npy("{'descr': '<f4', 'shape': (1, 2), }", 8)), Kind::kBadHeader);
  EXPECT_EQ(kind_of(make_npy("{'descr': '<f4', 'fortran_order': Nope, 'shape': (1, 2), }", 8)), Kind::kBadHeader);
  EXPECT_EQ(kind_of(make_npy("not a dict", 8)), Kind::kBadHeader);
  EXPECT_EQ(kind_of(make_npy(ok, 7)), Kind::kTruncated);
  EXPECT_EQ(kind_of(make_npy(ok, 9)), Kind::kTrailingData);

  auto truncated_header = make_npy(ok, 8);
  truncated_header.resize(20);
  EXPECT_EQ(kind_of(truncated_header), Kind::kTruncated);

  Matrix nan_matrix(2, 2, 1.0);
  nan_matrix(1, 0) = std::numeric_limits<double>::quiet_NaN();
  const auto nan_bytes = npy::write(nan_matrix, npy::Precision::kFloat64);
  try {
    npy::read(nan_bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), Kind::kNonFinite);
    EXPECT_EQ(e.position(), npy::parse_header(nan_bytes).data_offset + 16);
  }
  Matrix inf_matrix(1, 1, std::numeric_limits<double>::infinity());
  EXPECT_EQ(kind_of(npy::write(inf_matrix)), Kind::kNonFinite);
}

TEST(Npy, FormatErrorIsDataError) {
  EXPECT_THROW(npy::read(bytes_of("garbage!garbage!")), DataError);
}

TEST(Npy, MissingFileIsIoError) {
  EXPECT_THROW(npy::read_file("/nonexistent/dir/x.npy"), IoError);
}

TEST(Npy, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "reidtk_io_test.npy";
  const Matrix m = Matrix::from_rows({{1.5, -2}, {3, 4.25}});
  npy::write_file(path, m);
  EXPECT_EQ(npy::read_file(path), m);
  std::filesystem::remove(path);
}

TEST(Labels, ParsesLiteral) {
  const auto l = labels::read("pid,camid\n3,1\n3,2\n7,0\n");
  EXPECT_EQ(l.pids, (std::vector<std::int64_t>{3, 3, 7}));
  EXPECT_EQ(l.camids, (std::vector<std::int64_t>{1, 2, 0}));
}

TEST(Labels, ToleratesCrlfExtraColumnsAndTrailingBlankLines) {
  const auto l = labels::read("name,camid,pid\r\na.jpg,4,10\r\nb.jpg,5,11\r\n\r\n\n");
  EXPECT_EQ(l.pids, (std::vector<std::int64_t>{10, 11}));
  EXPECT_EQ(l.camids, (std::vector<std::int64_t>{4, 5}));
  EXPECT_EQ(labels::read("pid,camid").size(), 0u);
}

void expect_error(std::string_view text, Kind kind, std::size_t line) {
  try {
    labels::read(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), kind) << text;
    EXPECT_EQ(e.position(), line) << text;
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos) << e.what();
  }
}

TEST(Labels, Errors) {
  expect_error("", Kind::kEmpty, 1);
  expect_error("\n\n", Kind::kEmpty, 1);
  expect_error("pid,cam\n1,2\n", Kind::kMissingColumn, 1);
  expect_error("person,camid\n1,2\n", Kind::kMissingColumn, 1);
  expect_error("pid,camid\n1,2\nx,3\n", Kind::kBadField, 3);
  expect_error("pid,camid\n1,2.5\n", Kind::kBadField, 2);
  expect_error("pid,camid\n1,\n", Kind::kBadField, 2);
  expect_error("pid,camid\n1\n", Kind::kBadField, 2);
  expect_error("pid,camid\n1,2,3\n", Kind::kBadField, 2);
  expect_error("pid,camid\n-1,2\n", Kind::kBadField, 2);
  expect_error("pid,camid\n99999999999999999999,2\n", Kind::kBadField, 2);
}

TEST(Labels, WriteThenReadIsIdentity) {
  evalkit::SampleLabels l;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) l.push_back(static_cast<std::int64_t>(rng() % 100000), static_cast<std::int64_t>(rng() % 16));
  const std::string text = labels::write(l);
  EXPECT_EQ(text.substr(0, 10), "pid,camid\n");
  EXPECT_EQ(labels::read(text), l);
  EXPECT_EQ(labels::write(labels::read(text)), text);
}

TEST(Report, JsonRoundTrip) {
  evalkit::EvalReport r{{0.25, 0.5, 1.0}, 0.4321, 4, 1};
  const auto j = report::to_json(r, {{"k1", 2}});
  EXPECT_TRUE(j.contains("cmc"));
  EXPECT_TRUE(j.contains("mAP"));
  EXPECT_EQ(j["valid_queries"], 4);
  EXPECT_EQ(j["excluded_queries"], 1);
  EXPECT_EQ(j["config"]["k1"], 2);
  EXPECT_EQ(report::from_json(nlohmann::json::parse(j.dump())), r);
}

TEST(Report, RejectsMissingKeys) {
  auto j = report::to_json(evalkit::EvalReport{{1.0}, 1.0, 1, 0});
  j.erase("mAP");
  EXPECT_THROW(report::from_json(j), FormatError);
  j = report::to_json(evalkit::EvalReport{{1.0}, 1.0, 1, 0});
  j["cmc"] = "oops";
  EXPECT_THROW(report::from_json(j), FormatError);
}

TEST(FileIo, ErrorsNameThePath) {
  try {
    fileio::read_text("/nonexistent/labels.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/labels.csv"), std::string::npos);
  }
  EXPECT_THROW(fileio::write_text("/nonexistent/dir/out.txt", "x"), IoError);
}

}  // namespace
}  // namespace reidtk
