#include "mlmc/pde/field_io.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace mlmc::pde {
namespace {

constexpr std::array<char, 8> kMagic{'M', 'L', 'M', 'C', 'F', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("truncated field file");
  return v;
}

}  // namespace

void write_field(std::ostream& os, const VertexField& f) {
  if (f.values.size() != f.grid.size()) throw std::invalid_argument("field size does not match grid");
  os.write(kMagic.data(), kMagic.size());
  put<std::int32_t>(os, f.level);
  put<std::int32_t>(os, f.domain == Domain::unit ? 0 : 1);
  put<std::int32_t>(os, f.grid.n);
  put<double>(os, f.grid.h);
  for (double o : f.grid.origin) put<double>(os, o);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("failed to write field");
}

VertexField read_field(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic)
    throw std::runtime_error("not a field file");
  const auto level = get<std::int32_t>(is);
  const auto dom = get<std::int32_t>(is);
  const auto n = get<std::int32_t>(is);
  if (n < 1 || n > 4096 || (dom != 0 && dom != 1)) throw std::runtime_error("corrupt field header");
  Grid g;
  g.n = n;
  g.h = get<double>(is);
  for (double& o : g.origin) o = get<double>(is);
  VertexField f(g, dom == 0 ? Domain::unit : Domain::embedded, level);
  if (!is.read(reinterpret_cast<char*>(f.values.data()),
               static_cast<std::streamsize>(f.values.size() * sizeof(double))))
    throw std::runtime_error("truncated field file");
  return f;
}

void write_field(const std::filesystem::path& path, const VertexField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_field(os, f);
}

VertexField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_field(is);
}

void write_slice_csv(std::ostream& os, const VertexField& f, int k) {
  if (k < 0 || k > f.grid.n) throw std::invalid_argument("slice index out of range");
  os << "i,j,x,y,value\n";
  for (int j = 0; j <= f.grid.n; ++j)
    for (int i = 0; i <= f.grid.n; ++i) {
      const auto x = f.grid.position(i, j, k);
      os << i << ',' << j << ',' << x[0] << ',' << x[1] << ',' << f.at(i, j, k) << '\n';
    }
}

}  // namespace mlmc::pde
