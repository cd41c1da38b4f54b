#pragma once

// GRIDFN v1: ASCII header
//   GRIDFN v1
//   dim=<n>
//   box=<lo:hi,...>
//   h=<spacing>
// followed by one row-major node value per line (17 significant digits).

#include <filesystem>
#include <iosfwd>

#include "anisobound/grid.hpp"

namespace anisobound {

void write_gridfn(std::ostream& os, const GridFunction& u);
/// Throws std::runtime_error with a line number on malformed input.
GridFunction read_gridfn(std::istream& is);

void save_gridfn(const std::filesystem::path& path, const GridFunction& u);
GridFunction load_gridfn(const std::filesystem::path& path);

}  // namespace anisobound
