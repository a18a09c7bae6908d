#include "nargact/gridfile.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nargact {

namespace {

// presented as (axis1, axis2) regardless of the eval dimensionality
std::pair<GridAxis, GridAxis> two_axes(const GridEval& g) {
  if (g.axes.size() == 2) return {g.axes[0], g.axes[1]};
  if (g.axes.size() == 1) return {GridAxis{0.0, 0.0, 1}, g.axes[0]};
  fail("contract", "grid files hold 1-D or 2-D data, got " + std::to_string(g.axes.size()) + " axes");
}

}  // namespace

std::string grid_to_text(const GridEval& g) {
  const auto [a1, a2] = two_axes(g);
  if (static_cast<std::int64_t>(g.values.size()) != a1.n * a2.n)
    fail("contract", "grid value count does not match axis extents");
  std::ostringstream os;
  os << "# axis1 " << format_double(a1.lo) << " " << format_double(a1.hi) << " " << a1.n << "\n";
  os << "# axis2 " << format_double(a2.lo) << " " << format_double(a2.hi) << " " << a2.n << "\n";
  for (std::int64_t r = 0; r < a1.n; ++r) {
    for (std::int64_t c = 0; c < a2.n; ++c) {
      if (c) os << ",";
      os << format_double(g.values[static_cast<std::size_t>(r * a2.n + c)]);
    }
    os << "\n";
  }
  return os.str();
}

GridEval grid_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  GridAxis axes[2];
  for (int i = 0; i < 2; ++i) {
    if (!std::getline(is, line)) fail("format", "grid file missing axis header " + std::to_string(i + 1));
    std::istringstream ls(line);
    std::string hash, name;
    ls >> hash >> name >> axes[i].lo >> axes[i].hi >> axes[i].n;
    const std::string want = "axis" + std::to_string(i + 1);
    if (hash != "#" || name != want || !ls || axes[i].n < 1)
      fail("format", "bad grid header line: '" + line + "'");
  }
  GridEval g;
  g.axes = {axes[0], axes[1]};
  g.values.reserve(static_cast<std::size_t>(axes[0].n * axes[1].n));
  for (std::int64_t r = 0; r < axes[0].n; ++r) {
    if (!std::getline(is, line)) fail("format", "grid file truncated at row " + std::to_string(r));
    const char* p = line.c_str();
    for (std::int64_t c = 0; c < axes[1].n; ++c) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) fail("format", "bad grid value in row " + std::to_string(r));
      g.values.push_back(v);
      p = end;
      if (*p == ',') ++p;
    }
    if (*p != '\0') fail("format", "extra data in grid row " + std::to_string(r));
  }
  if (axes[0].n == 1 && axes[0].lo == 0.0 && axes[0].hi == 0.0) g.axes = {axes[1]};
  return g;
}

void write_grid(const std::string& path, const GridEval& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io", "cannot write '" + path + "'");
  out << grid_to_text(g);
}

GridEval read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return grid_from_text(ss.str());
}

}  // namespace nargact
