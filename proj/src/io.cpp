#include "kgprop/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace kgprop {

namespace {

static_assert(sizeof(double) == 8);

void put_le(std::ofstream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), 8);
}

double get_le(std::ifstream& in) {
  std::uint64_t bits = 0;
  in.read(reinterpret_cast<char*>(&bits), 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_field(const std::string& dir, const std::string& name, const SpatialGrid& g,
                 const TimeGrid& tg, const CRowMat& values) {
  if (values.rows() != tg.nodes() || values.cols() != g.size())
    throw ShapeError("write_field: values do not match the grids");
  std::ofstream bin(dir + "/" + name + ".bin", std::ios::binary);
  if (!bin) throw Error("cannot write " + dir + "/" + name + ".bin");
  for (Eigen::Index n = 0; n < values.rows(); ++n)
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      put_le(bin, values(n, j).real());
      put_le(bin, values(n, j).imag());
    }
  nlohmann::json side = {{"shape", {values.rows(), values.cols()}},
                         {"dt", tg.dt()},
                         {"dx", g.dx()},
                         {"T_min", tg.t_min()},
                         {"L", g.length()},
                         {"field", name},
                         {"dtype", "complex128"},
                         {"byte_order", "little"}};
  std::ofstream js(dir + "/" + name + ".json");
  js << side.dump(2) << "\n";
}

CRowMat read_field(const std::string& dir, const std::string& name) {
  std::ifstream js(dir + "/" + name + ".json");
  if (!js) throw Error("cannot read " + dir + "/" + name + ".json");
  const nlohmann::json side = nlohmann::json::parse(js);
  const long rows = side.at("shape")[0].get<long>(), cols = side.at("shape")[1].get<long>();
  std::ifstream bin(dir + "/" + name + ".bin", std::ios::binary | std::ios::ate);
  if (!bin) throw Error("cannot read " + dir + "/" + name + ".bin");
  if (static_cast<long>(bin.tellg()) != rows * cols * 16)
    throw ShapeError("field file size does not match its sidecar shape");
  bin.seekg(0);
  CRowMat out(rows, cols);
  for (long n = 0; n < rows; ++n)
    for (long j = 0; j < cols; ++j) {
      const double re = get_le(bin);
      out(n, j) = cplx(re, get_le(bin));
    }
  return out;
}

void write_csv(const std::string& path, const std::string& xname, const std::string& yname,
               const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("write_csv: column lengths differ");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot write " + path);
  std::fprintf(f, "%s,%s\n", xname.c_str(), yname.c_str());
  // %.17g is locale-independent for the C locale the process starts in.
  for (std::size_t i = 0; i < x.size(); ++i) std::fprintf(f, "%.17g,%.17g\n", x[i], y[i]);
  std::fclose(f);
}

}  // namespace kgprop
