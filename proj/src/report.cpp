#include "odoforge/report.hpp"

#include "odoforge/error.hpp"

#include <cstdio>

namespace odoforge {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Inconclusive: return "INCONCLUSIVE";
    case Status::Info: return "INFO";
  }
  return "?";
}

void Report::add(Check c) {
  if (c.status == Status::Fail && !c.witness)
    throw Error(ErrorKind::InvariantViolation, "FAIL for " + c.name + " has no witness");
  checks_.push_back(std::move(c));
}

void Report::set_error(std::string stage, std::string kind, std::string message) {
  error_ = Json{{"stage", std::move(stage)}, {"kind", std::move(kind)}, {"message", std::move(message)}};
}

int Report::exit_code() const {
  if (error_) return 3;
  bool inconclusive = false;
  for (const auto& c : checks_) {
    if (c.status == Status::Fail) return 1;
    inconclusive = inconclusive || c.status == Status::Inconclusive;
  }
  return inconclusive ? 2 : 0;
}

Json Report::body() const {
  Json b;
  b["command"] = command_;
  b["config_hash"] = config_hash_;
  Json checks = Json::array();
  for (const auto& c : checks_) {
    Json j{{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}};
    if (c.witness) j["witness"] = *c.witness;
    if (!c.data.is_null()) j["data"] = c.data;
    checks.push_back(std::move(j));
  }
  b["checks"] = std::move(checks);
  b["artifacts"] = artifacts_;
  if (error_) b["error"] = *error_;
  b["exit_code"] = exit_code();
  return b;
}

std::string Report::file_text() const {
  Json t = Json::object();
  for (const auto& [stage, ms] : timing_) t[stage + "_ms"] = ms;
  Json f;
  f["body"] = body();
  f["body_hash"] = fnv1a_hex(body_text());
  f["timing"] = std::move(t);
  return f.dump(2) + "\n";
}

}  // namespace odoforge
