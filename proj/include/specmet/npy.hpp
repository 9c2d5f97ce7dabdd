// NPY v1.0 reader/writer. Floats are widened to double on read; files are
// always written as little-endian '<f8' (or '<i8' for label vectors) in
// C order, so a write/read round trip is bit-exact.
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace specmet {

// Dense tensor in C (row-major) order.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;

  std::int64_t size() const {
    std::int64_t n = 1;
    for (std::int64_t d : shape) n *= d;
    return n;
  }
};

// Reads a float array ('<f4' or '<f8', any rank >= 1). Rejects non-finite
// payloads, Fortran order, and anything that is not NPY v1.0.
Tensor read_array_file(const std::filesystem::path& path);

// Writes '<f8', C order, v1.0 header.
void write_array_file(const std::filesystem::path& path, const Tensor& t);

// Label vectors: 1-D '<i8'.
std::vector<std::int64_t> read_labels_file(const std::filesystem::path& path);
void write_labels_file(const std::filesystem::path& path,
                       const std::vector<std::int64_t>& labels);

}  // namespace specmet
