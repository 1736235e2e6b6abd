#include "dmv/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

namespace dmv {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_le(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_le(std::istream& is) {
  std::uint64_t bits = 0;
  is.read(reinterpret_cast<char*>(&bits), sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

std::string snapshot_header(const Grid& grid, Index components, double time) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", time);
  std::ostringstream os;
  os << '{' << grid.dim() << ", " << grid.describe() << ", " << components << ", " << buf << '}';
  return os.str();
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  if (snap.data.rows() != snap.grid.cells()) throw InvalidArgument("write_snapshot: row count does not match grid");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("write_snapshot: cannot open " + path.string());
  os << snapshot_header(snap.grid, snap.data.cols(), snap.time) << '\n';
  for (Index c = 0; c < snap.data.rows(); ++c)
    for (Index k = 0; k < snap.data.cols(); ++k) put_le(os, snap.data(c, k));
  if (!os) throw FormatError("write_snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("read_snapshot: cannot open " + path.string());
  std::string header;
  std::getline(is, header);
  static const std::regex pattern(R"(^\{([12]), \[([0-9]+)(?:,([0-9]+))?\], ([0-9]+), ([^}]+)\}$)");
  std::smatch m;
  if (!std::regex_match(header, m, pattern)) throw FormatError("read_snapshot: malformed header in " + path.string());
  const int dim = std::stoi(m[1]);
  std::vector<int> sizes{std::stoi(m[2])};
  if (m[3].matched) sizes.push_back(std::stoi(m[3]));
  if (static_cast<int>(sizes.size()) != dim) throw FormatError("read_snapshot: dim does not match sizes");
  const Index comps = std::stol(m[4]);
  double time = 0;
  try {
    std::size_t used = 0;
    time = std::stod(m[5].str(), &used);
    if (used != m[5].str().size()) throw FormatError("read_snapshot: bad time field");
  } catch (const std::logic_error&) {
    throw FormatError("read_snapshot: bad time field");
  }
  Grid grid = [&] {
    try {
      return Grid(sizes);
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("read_snapshot: ") + e.what());
    }
  }();
  if (comps < 1) throw FormatError("read_snapshot: component count must be positive");
  Snapshot snap{grid, time, Eigen::ArrayXXd(grid.cells(), comps)};
  for (Index c = 0; c < grid.cells(); ++c)
    for (Index k = 0; k < comps; ++k) snap.data(c, k) = get_le(is);
  if (!is) throw FormatError("read_snapshot: truncated payload in " + path.string());
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("read_snapshot: trailing bytes in " + path.string());
  return snap;
}

Snapshot make_state_snapshot(const ScalarField& rho, const VectorField& mom, double time) {
  detail::require_same_grid(rho.grid(), mom.grid(), "make_state_snapshot");
  const Grid& g = rho.grid();
  Eigen::ArrayXXd data(g.cells(), 1 + g.dim());
  data.col(0) = rho.values();
  data.rightCols(g.dim()) = mom.values();
  return {g, time, std::move(data)};
}

}  // namespace dmv
