#include "specmet/npy.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "specmet/errors.hpp"

namespace specmet {
namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::int64_t> shape;
};

void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n')) ++i;
}

std::string parse_py_string(const std::string& s, std::size_t& i,
                            const std::filesystem::path& path) {
  if (i >= s.size() || (s[i] != '\'' && s[i] != '"'))
    throw FormatError("bad NPY header dict in " + path.string());
  const char quote = s[i++];
  std::string out;
  while (i < s.size() && s[i] != quote) out += s[i++];
  if (i >= s.size()) throw FormatError("unterminated string in NPY header of " + path.string());
  ++i;
  return out;
}

// The header is a tiny Python dict literal with three known keys. Parse it
// directly rather than dragging in a real parser.
Header parse_header(const std::string& s, const std::filesystem::path& path) {
  Header h;
  bool saw_descr = false, saw_order = false, saw_shape = false;
  std::size_t i = 0;
  skip_ws(s, i);
  if (i >= s.size() || s[i] != '{') throw FormatError("NPY header is not a dict in " + path.string());
  ++i;
  while (true) {
    skip_ws(s, i);
    if (i < s.size() && s[i] == ',') { ++i; continue; }
    if (i < s.size() && s[i] == '}') break;
    if (i >= s.size()) throw FormatError("unterminated NPY header dict in " + path.string());
    const std::string key = parse_py_string(s, i, path);
    skip_ws(s, i);
    if (i >= s.size() || s[i] != ':') throw FormatError("bad NPY header dict in " + path.string());
    ++i;
    skip_ws(s, i);
    if (key == "descr") {
      h.descr = parse_py_string(s, i, path);
      saw_descr = true;
    } else if (key == "fortran_order") {
      if (s.compare(i, 4, "True") == 0) { h.fortran_order = true; i += 4; }
      else if (s.compare(i, 5, "False") == 0) { h.fortran_order = false; i += 5; }
      else throw FormatError("bad fortran_order in NPY header of " + path.string());
      saw_order = true;
    } else if (key == "shape") {
      if (i >= s.size() || s[i] != '(') throw FormatError("bad shape in NPY header of " + path.string());
      ++i;
      while (true) {
        skip_ws(s, i);
        if (i < s.size() && s[i] == ')') { ++i; break; }
        std::size_t end = 0;
        std::int64_t dim = 0;
        try {
          dim = std::stoll(s.substr(i), &end);
        } catch (const std::exception&) {
          throw FormatError("bad shape in NPY header of " + path.string());
        }
        if (end == 0 || dim < 0) throw FormatError("bad shape in NPY header of " + path.string());
        h.shape.push_back(dim);
        i += end;
        skip_ws(s, i);
        if (i < s.size() && s[i] == ',') ++i;
      }
      saw_shape = true;
    } else {
      throw FormatError("unexpected key '" + key + "' in NPY header of " + path.string());
    }
  }
  if (!saw_descr || !saw_order || !saw_shape)
    throw FormatError("NPY header missing required keys in " + path.string());
  return h;
}

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  char magic[6];
  if (!in.read(magic, 6) || std::memcmp(magic, kMagic, 6) != 0)
    throw FormatError("not an NPY file: " + path.string());
  unsigned char version[2];
  if (!in.read(reinterpret_cast<char*>(version), 2))
    throw FormatError("truncated NPY header in " + path.string());
  if (version[0] != 1 || version[1] != 0)
    throw UnsupportedError("unsupported NPY version " + std::to_string(version[0]) + "." +
                           std::to_string(version[1]) + " in " + path.string());
  unsigned char len_bytes[2];
  if (!in.read(reinterpret_cast<char*>(len_bytes), 2))
    throw FormatError("truncated NPY header in " + path.string());
  const std::size_t header_len = len_bytes[0] | (static_cast<std::size_t>(len_bytes[1]) << 8);
  std::string header(header_len, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(header_len)))
    throw FormatError("truncated NPY header in " + path.string());
  Header h = parse_header(header, path);
  if (h.fortran_order)
    throw UnsupportedError("Fortran-order arrays are not supported: " + path.string());
  if (h.shape.empty())
    throw UnsupportedError("0-d arrays are not supported: " + path.string());
  return h;
}

std::string index_string(const std::vector<std::int64_t>& shape, std::int64_t flat) {
  std::string s = "(";
  std::vector<std::int64_t> idx(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  for (std::size_t k = 0; k < idx.size(); ++k)
    s += (k ? ", " : "") + std::to_string(idx[k]);
  return s + ")";
}

void check_payload_size(std::ifstream& in, std::int64_t count, std::size_t item,
                        const std::filesystem::path& path) {
  const auto pos = in.tellg();
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  in.seekg(pos);
  const std::int64_t want = count * static_cast<std::int64_t>(item);
  if (end - pos != want)
    throw FormatError("NPY payload size mismatch in " + path.string() + ": expected " +
                      std::to_string(want) + " bytes, found " + std::to_string(end - pos));
}

std::string shape_tuple(const std::vector<std::int64_t>& shape) {
  std::string s = "(";
  for (std::size_t k = 0; k < shape.size(); ++k) s += (k ? ", " : "") + std::to_string(shape[k]);
  if (shape.size() == 1) s += ",";
  return s + ")";
}

void write_npy(const std::filesystem::path& path, const std::string& descr,
               const std::vector<std::int64_t>& shape, const void* data, std::size_t bytes) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " +
                     shape_tuple(shape) + ", }";
  // pad so magic + version + length field + dict is a multiple of 64
  std::size_t total = 10 + dict.size() + 1;
  const std::size_t pad = (64 - total % 64) % 64;
  dict.append(pad, ' ');
  dict += '\n';
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot open " + path.string() + " for writing");
  out.write(kMagic, 6);
  const unsigned char version[2] = {1, 0};
  out.write(reinterpret_cast<const char*>(version), 2);
  const std::size_t hlen = dict.size();
  const unsigned char len_bytes[2] = {static_cast<unsigned char>(hlen & 0xff),
                                      static_cast<unsigned char>((hlen >> 8) & 0xff)};
  out.write(reinterpret_cast<const char*>(len_bytes), 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw LoadError("failed writing " + path.string());
}

}  // namespace

Tensor read_array_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  const Header h = read_header(in, path);
  if (h.descr != "<f4" && h.descr != "<f8")
    throw UnsupportedError("unsupported dtype '" + h.descr + "' in " + path.string() +
                           " (want '<f4' or '<f8')");
  Tensor t;
  t.shape = h.shape;
  const std::int64_t n = t.size();
  t.data.resize(static_cast<std::size_t>(n));
  if (h.descr == "<f8") {
    check_payload_size(in, n, 8, path);
    if (n && !in.read(reinterpret_cast<char*>(t.data.data()), n * 8))
      throw FormatError("truncated NPY payload in " + path.string());
  } else {
    check_payload_size(in, n, 4, path);
    std::vector<float> buf(static_cast<std::size_t>(n));
    if (n && !in.read(reinterpret_cast<char*>(buf.data()), n * 4))
      throw FormatError("truncated NPY payload in " + path.string());
    for (std::int64_t i = 0; i < n; ++i)
      t.data[static_cast<std::size_t>(i)] = static_cast<double>(buf[static_cast<std::size_t>(i)]);
  }
  for (std::int64_t i = 0; i < n; ++i) {
    if (!std::isfinite(t.data[static_cast<std::size_t>(i)]))
      throw DataError("non-finite value at index " + index_string(t.shape, i) + " (flat " +
                      std::to_string(i) + ") in " + path.string());
  }
  return t;
}

void write_array_file(const std::filesystem::path& path, const Tensor& t) {
  if (t.shape.empty()) throw DomainError("refusing to write 0-d tensor to " + path.string());
  if (static_cast<std::int64_t>(t.data.size()) != t.size())
    throw ShapeError("tensor data length does not match shape when writing " + path.string());
  write_npy(path, "<f8", t.shape, t.data.data(), t.data.size() * 8);
}

std::vector<std::int64_t> read_labels_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  const Header h = read_header(in, path);
  if (h.descr != "<i8")
    throw UnsupportedError("unsupported label dtype '" + h.descr + "' in " + path.string() +
                           " (want '<i8')");
  if (h.shape.size() != 1)
    throw UnsupportedError("label file must be 1-D: " + path.string());
  std::vector<std::int64_t> labels(static_cast<std::size_t>(h.shape[0]));
  check_payload_size(in, h.shape[0], 8, path);
  if (h.shape[0] && !in.read(reinterpret_cast<char*>(labels.data()), h.shape[0] * 8))
    throw FormatError("truncated NPY payload in " + path.string());
  return labels;
}

void write_labels_file(const std::filesystem::path& path,
                       const std::vector<std::int64_t>& labels) {
  const std::vector<std::int64_t> shape = {static_cast<std::int64_t>(labels.size())};
  write_npy(path, "<i8", shape, labels.data(), labels.size() * 8);
}

}  // namespace specmet
