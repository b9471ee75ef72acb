#include "avlt/params.hpp"

#include <cstdint>
#include <fstream>

namespace avlt {

namespace {

constexpr char kMagic[] = "AVLT1";

template <typename T>
void write_raw(std::ostream& os, T value) {
  // Little-endian host assumed (x86/ARM); payload is defined little-endian.
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw InvalidArgument("checkpoint: truncated file");
  return value;
}

}  // namespace

void save_params(const ParamStore& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidArgument("checkpoint: cannot open for write: " + path);
  os.write(kMagic, 5);
  for (const auto& [name, m] : params) {
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    const bool vector = m.cols() == 1;
    write_raw<std::uint32_t>(os, vector ? 1u : 2u);
    write_raw<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
    if (!vector) write_raw<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        write_raw<double>(os, m(r, c));
      }
    }
  }
  if (!os) throw InvalidArgument("checkpoint: write failed: " + path);
}

ParamStore load_params(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("checkpoint: cannot open: " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::string(magic, 5) != kMagic) {
    throw InvalidArgument("checkpoint: bad magic in " + path);
  }
  ParamStore params;
  while (true) {
    std::uint32_t name_len;
    is.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
    if (is.eof()) break;
    if (!is) throw InvalidArgument("checkpoint: truncated file");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const auto rank = read_raw<std::uint32_t>(is);
    if (rank != 1 && rank != 2) throw InvalidArgument("checkpoint: unsupported rank");
    const auto rows = static_cast<Eigen::Index>(read_raw<std::uint64_t>(is));
    const auto cols = rank == 2 ? static_cast<Eigen::Index>(read_raw<std::uint64_t>(is)) : 1;
    Eigen::MatrixXd& m = params.add(name, rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        m(r, c) = read_raw<double>(is);
      }
    }
  }
  return params;
}

}  // namespace avlt
