#pragma once

#include "odoforge/coset.hpp"
#include "odoforge/error.hpp"
#include "odoforge/word.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odoforge {

// Positioned config error. Syntax errors carry line and column (1-based);
// semantic errors carry the offending field.
class ConfigError : public Error {
 public:
  ConfigError(ErrorKind kind, int line, int column, std::string field, const std::string& reason);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_, column_;
  std::string field_;
};

inline constexpr std::string_view kVerbs[] = {"validate", "toeplitz", "periods", "factor", "eigen", "measure", "all"};
bool is_verb(std::string_view v);

struct RunConfig {
  GroupPtr group;
  std::vector<std::vector<Word>> levels;  // generators of Γ_1..Γ_K
  int depth = 0;
  int radius = 6;         // residuality, stabilizers, period and verify sampling
  std::optional<std::vector<Word>> window;  // default: D_N
  int sample_radius = 16;
  double tolerance = 1e-9;
  std::string command = "all";
  Caps caps = default_caps();
  std::optional<std::filesystem::path> factor_target;
  std::optional<std::filesystem::path> array_file;

  // Stable text of every effective setting; hashed into reports.
  std::string canonical() const;
};

// `base_dir` resolves relative paths (factor target, array file).
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& file);

std::string read_file(const std::filesystem::path& file);

}  // namespace odoforge
