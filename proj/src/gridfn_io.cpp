#include "anisobound/gridfn_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "anisobound/format.hpp"

namespace anisobound {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("GRIDFN line " + std::to_string(line) + ": " + what);
}

std::string expect_key(std::istream& is, int line, const std::string& key) {
  std::string text;
  if (!std::getline(is, text)) fail(line, "missing '" + key + "=' header");
  const std::string prefix = key + "=";
  if (text.rfind(prefix, 0) != 0) fail(line, "expected '" + prefix + "', got '" + text + "'");
  return text.substr(prefix.size());
}

}  // namespace

void write_gridfn(std::ostream& os, const GridFunction& u) {
  const Grid& g = u.grid();
  os << "GRIDFN v1\n";
  os << "dim=" << g.dim() << '\n';
  os << "box=";
  for (int i = 0; i < g.dim(); ++i) {
    if (i) os << ',';
    os << fmt17(g.box()[i].lo) << ':' << fmt17(g.box()[i].hi);
  }
  os << '\n';
  os << "h=" << fmt17(g.h()) << '\n';
  for (double v : u.values()) os << fmt17(v) << '\n';
}

GridFunction read_gridfn(std::istream& is) {
  std::string magic;
  if (!std::getline(is, magic) || magic != "GRIDFN v1") fail(1, "expected 'GRIDFN v1'");

  int dim = 0;
  try {
    dim = std::stoi(expect_key(is, 2, "dim"));
  } catch (const std::logic_error&) {
    fail(2, "bad dimension");
  }
  if (dim < 1) fail(2, "dimension must be >= 1");

  std::vector<Interval> box;
  {
    std::stringstream ss(expect_key(is, 3, "box"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) fail(3, "interval '" + item + "' lacks ':'");
      try {
        box.push_back({parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1))});
      } catch (const std::invalid_argument& e) {
        fail(3, e.what());
      }
    }
  }
  if (static_cast<int>(box.size()) != dim) fail(3, "box has wrong number of axes");

  double h = 0.0;
  try {
    h = parse_double(expect_key(is, 4, "h"));
  } catch (const std::invalid_argument& e) {
    fail(4, e.what());
  }

  Grid grid = [&] {
    try {
      return make_grid(std::move(box), h);
    } catch (const std::invalid_argument& e) {
      fail(4, e.what());
    }
  }();

  std::vector<double> values;
  values.reserve(grid.num_nodes());
  std::string text;
  int line = 4;
  while (std::getline(is, text)) {
    ++line;
    if (text.empty()) continue;
    if (values.size() == grid.num_nodes()) fail(line, "more values than grid nodes");
    try {
      values.push_back(parse_double(text));
    } catch (const std::invalid_argument& e) {
      fail(line, e.what());
    }
  }
  if (values.size() != grid.num_nodes()) {
    fail(line, "expected " + std::to_string(grid.num_nodes()) + " values, found " +
                   std::to_string(values.size()));
  }
  return GridFunction(std::move(grid), std::move(values));
}

void save_gridfn(const std::filesystem::path& path, const GridFunction& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_gridfn(os, u);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

GridFunction load_gridfn(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_gridfn(is);
}

}  // namespace anisobound
