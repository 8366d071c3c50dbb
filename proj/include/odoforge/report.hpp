#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace odoforge {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

enum class Status { Pass, Fail, Inconclusive, Info };
std::string_view to_string(Status s);

struct Check {
  std::string name;
  Status status = Status::Info;
  std::string detail;
  std::optional<std::string> witness;
  Json data;
};

/// Deterministic run report. body() holds everything derived from the
/// config; timing lives beside it and is never part of the body.
class Report {
 public:
  Report(std::string command, std::string config_hash)
      : command_(std::move(command)), config_hash_(std::move(config_hash)) {}

  // A FAIL without a witness is rejected.
  void add(Check c);
  void set_error(std::string stage, std::string kind, std::string message);
  void add_artifact(std::string name) { artifacts_.push_back(std::move(name)); }
  void add_timing(std::string stage, double ms) { timing_.emplace_back(std::move(stage), ms); }

  const std::vector<Check>& checks() const noexcept { return checks_; }
  bool has_error() const noexcept { return error_.has_value(); }

  // 0 all pass, 1 any fail, 2 inconclusive without fail, 3 error
  int exit_code() const;

  Json body() const;
  std::string body_text() const { return body().dump(2) + "\n"; }
  // {"body": ..., "timing": ...}
  std::string file_text() const;

 private:
  std::string command_;
  std::string config_hash_;
  std::vector<Check> checks_;
  std::vector<std::string> artifacts_;
  std::optional<Json> error_;
  std::vector<std::pair<std::string, double>> timing_;
};

}  // namespace odoforge
