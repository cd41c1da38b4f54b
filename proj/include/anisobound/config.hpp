#pragma once

// Run configuration files: flat "key = value" lines grouped under [section]
// headers, '#' comments, "inf" as the infinity literal. Builders turn the
// sections into library objects and report errors by line and field.

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anisobound/degiorgi.hpp"
#include "anisobound/exponents.hpp"
#include "anisobound/grid.hpp"
#include "anisobound/integrand.hpp"
#include "anisobound/minimize.hpp"

namespace anisobound {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw parsed file. Keys are "section.key" ("key" for the leading block).
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::filesystem::path& path);

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }
  [[nodiscard]] const Entry* find(const std::string& key) const;
  /// Throws ConfigError naming the missing field.
  [[nodiscard]] const Entry& require(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

struct CertifySettings {
  Point x0;
  double R = 0.0;
  int H = 40;
  /// Empty means "calibrate".
  std::optional<double> C_cal = 1.0;
  std::optional<double> holder_constant;
};

struct VerifySettings {
  Point x0;
  std::vector<double> k{1.0};
  std::vector<double> R;
  std::vector<double> rho_fraction{0.5};
  std::vector<Interval> sub_box;
};

struct QuasiminimalitySettings {
  std::size_t count = 20;
  std::uint64_t seed = 1;
  double amplitude = 0.1;
};

struct RunConfig {
  ConfigFile file;
  std::string name;

  [[nodiscard]] Exponents exponents() const;
  [[nodiscard]] Grid grid() const;
  [[nodiscard]] ModelIntegrand model() const;
  [[nodiscard]] BoundaryFunction boundary() const;
  [[nodiscard]] InitialGuess initial_guess() const;
  [[nodiscard]] SolveConfig solver() const;
  [[nodiscard]] QuasiminimalitySettings quasiminimality() const;
  [[nodiscard]] CertifySettings certify() const;
  [[nodiscard]] VerifySettings verify() const;
  /// [output] dir, "." when absent.
  [[nodiscard]] std::filesystem::path output_dir() const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::istream& in);

}  // namespace anisobound
