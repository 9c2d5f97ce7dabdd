#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "specmet/errors.hpp"
#include "specmet/npy.hpp"

using namespace specmet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "specmet_npy_tests";
  fs::create_directories(dir);
  return dir;
}

// Builds an NPY v1.0 file byte by byte, independent of the library writer.
void craft_npy(const fs::path& path, const std::string& descr, bool fortran,
               const std::string& shape, const void* payload, std::size_t payload_bytes) {
  std::string header = "{'descr': '" + descr + "', 'fortran_order': " +
                       (fortran ? "True" : "False") + ", 'shape': " + shape + ", }";
  // magic(6) + version(2) + header_len(2) + header, padded so the total is a
  // multiple of 16 and the header ends in \n
  std::size_t total = 10 + header.size() + 1;
  const std::size_t pad = (16 - total % 16) % 16;
  header.append(pad, ' ');
  header.push_back('\n');

  std::ofstream f(path, std::ios::binary);
  f.write("\x93NUMPY\x01\x00", 8);
  const std::uint16_t hlen = static_cast<std::uint16_t>(header.size());
  f.put(static_cast<char>(hlen & 0xff));
  f.put(static_cast<char>(hlen >> 8));
  f.write(header.data(), static_cast<std::streamsize>(header.size()));
  f.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
}

}  // namespace

TEST_CASE("write/read round trip is bit exact") {
  const fs::path p = temp_dir() / "roundtrip.npy";
  Tensor t;
  t.shape = {3, 4};
  for (int i = 0; i < 12; ++i) t.data.push_back(0.1 * i - 0.37);
  t.data[5] = 1e-300;
  t.data[7] = -1234567.875;
  write_array_file(p, t);

  const Tensor back = read_array_file(p);
  REQUIRE(back.shape == t.shape);
  REQUIRE(back.data.size() == t.data.size());
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    CHECK(std::memcmp(&back.data[i], &t.data[i], sizeof(double)) == 0);
  }
}

TEST_CASE("1-D and 4-D shapes survive the header") {
  const fs::path dir = temp_dir();

  Tensor one;
  one.shape = {7};
  one.data = {1, 2, 3, 4, 5, 6, 7};
  write_array_file(dir / "one.npy", one);
  CHECK(read_array_file(dir / "one.npy").shape == std::vector<std::int64_t>{7});

  Tensor four;
  four.shape = {3, 3, 2, 5};
  four.data.assign(90, 0.5);
  write_array_file(dir / "four.npy", four);
  const Tensor back = read_array_file(dir / "four.npy");
  CHECK(back.shape == (std::vector<std::int64_t>{3, 3, 2, 5}));
  CHECK(back.size() == 90);
}

TEST_CASE("float32 payloads widen to double") {
  const fs::path p = temp_dir() / "f32.npy";
  const float vals[6] = {0.0f, 1.5f, -2.25f, 3.0e-7f, 1.0e8f, -0.125f};
  craft_npy(p, "<f4", false, "(2, 3)", vals, sizeof(vals));

  const Tensor t = read_array_file(p);
  REQUIRE(t.shape == (std::vector<std::int64_t>{2, 3}));
  for (int i = 0; i < 6; ++i) CHECK(t.data[static_cast<std::size_t>(i)] ==
                                    static_cast<double>(vals[i]));
}

TEST_CASE("trailing-comma 1-D shape tuple parses") {
  const fs::path p = temp_dir() / "tuple1.npy";
  const double vals[3] = {9.0, 8.0, 7.0};
  craft_npy(p, "<f8", false, "(3,)", vals, sizeof(vals));
  const Tensor t = read_array_file(p);
  CHECK(t.shape == std::vector<std::int64_t>{3});
  CHECK(t.data[2] == 7.0);
}

TEST_CASE("bad magic is a format error") {
  const fs::path p = temp_dir() / "badmagic.npy";
  std::ofstream(p, std::ios::binary).write("\x93NUMPZ\x01\x00xxxxxxxxxx", 18);
  CHECK_THROWS_AS(read_array_file(p), FormatError);
}

TEST_CASE("fortran order is rejected") {
  const fs::path p = temp_dir() / "fortran.npy";
  const double vals[4] = {1, 2, 3, 4};
  craft_npy(p, "<f8", true, "(2, 2)", vals, sizeof(vals));
  CHECK_THROWS_AS(read_array_file(p), UnsupportedError);
}

TEST_CASE("unknown dtypes are rejected") {
  const fs::path p = temp_dir() / "dtype.npy";
  const double vals[2] = {1, 2};
  craft_npy(p, "<c16", false, "(2,)", vals, sizeof(vals));
  CHECK_THROWS_AS(read_array_file(p), UnsupportedError);
  craft_npy(p, ">f8", false, "(2,)", vals, sizeof(vals));
  CHECK_THROWS_AS(read_array_file(p), UnsupportedError);
}

TEST_CASE("payload size must match the shape exactly") {
  const fs::path p = temp_dir() / "short.npy";
  const double vals[3] = {1, 2, 3};
  craft_npy(p, "<f8", false, "(2, 2)", vals, sizeof(vals));  // one value short
  CHECK_THROWS_AS(read_array_file(p), FormatError);

  // one value long
  const double vals5[5] = {1, 2, 3, 4, 5};
  craft_npy(p, "<f8", false, "(2, 2)", vals5, sizeof(vals5));
  CHECK_THROWS_AS(read_array_file(p), FormatError);
}

TEST_CASE("non-finite payloads are refused and the message names the index") {
  const fs::path p = temp_dir() / "nan.npy";
  double vals[4] = {1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 4.0};
  craft_npy(p, "<f8", false, "(4,)", vals, sizeof(vals));
  try {
    read_array_file(p);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }

  vals[2] = std::numeric_limits<double>::infinity();
  craft_npy(p, "<f8", false, "(4,)", vals, sizeof(vals));
  CHECK_THROWS_AS(read_array_file(p), DataError);
}

TEST_CASE("missing file is a load error") {
  CHECK_THROWS_AS(read_array_file(temp_dir() / "no_such_file.npy"), LoadError);
}

TEST_CASE("labels round trip as 64-bit integers") {
  const fs::path p = temp_dir() / "labels.npy";
  const std::vector<std::int64_t> labels = {0, 3, 1, 2, 2, 0, 9223372036854775807ll};
  write_labels_file(p, labels);
  CHECK(read_labels_file(p) == labels);
}

TEST_CASE("labels reject 2-D files and float dtypes") {
  const fs::path p = temp_dir() / "badlabels.npy";
  const std::int64_t vals[4] = {0, 1, 2, 3};
  craft_npy(p, "<i8", false, "(2, 2)", vals, sizeof(vals));
  CHECK_THROWS_AS(read_labels_file(p), UnsupportedError);

  const double fvals[2] = {0.0, 1.0};
  craft_npy(p, "<f8", false, "(2,)", fvals, sizeof(fvals));
  CHECK_THROWS_AS(read_labels_file(p), UnsupportedError);
}

TEST_CASE("written headers keep the 64-byte alignment convention") {
  const fs::path p = temp_dir() / "aligned.npy";
  Tensor t;
  t.shape = {2};
  t.data = {1.0, 2.0};
  write_array_file(p, t);

  std::ifstream f(p, std::ios::binary);
  char magic[8];
  f.read(magic, 8);
  unsigned char lenbytes[2];
  f.read(reinterpret_cast<char*>(lenbytes), 2);
  const std::size_t hlen = lenbytes[0] | (lenbytes[0 + 1] << 8);
  CHECK((10 + hlen) % 64 == 0);
}
