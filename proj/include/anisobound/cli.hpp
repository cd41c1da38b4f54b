#pragma once

// Batch front end. Every command returns its exit status instead of calling
// exit(), so the commands can be driven from tests.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "anisobound/exponents.hpp"

namespace anisobound::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kInadmissible = 2,
  kNotConverged = 3,
  kCheckFailed = 4,
};

using Fields = std::vector<std::pair<std::string, std::string>>;

/// Condition flags and exponent constants as printed by `admissible` and by
/// each `sweep` row. Undefined quantities print as "na".
Fields admissibility_fields(const Exponents& e);

/// `out_dir` overrides [output] dir when set.
int cmd_admissible(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_minimize(const std::filesystem::path& config,
                 const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
                 std::ostream& err);
int cmd_certify(const std::filesystem::path& config, const std::filesystem::path& solution,
                const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
                std::ostream& err);
int cmd_verify(const std::filesystem::path& config, const std::filesystem::path& solution,
               const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
               std::ostream& err);
/// `axis` is "param=lo:hi:steps" with param in {gamma, q, s, r, p}. The CSV
/// goes to `out`, and to <out_dir>/sweep.csv when out_dir is set.
int cmd_sweep(const std::filesystem::path& config, const std::string& axis,
              const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
              std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anisobound::cli
