#pragma once

#include "odoforge/config.hpp"
#include "odoforge/report.hpp"

#include <filesystem>
#include <string_view>

namespace odoforge {

// Runs `verb` on the config. Artifacts go to `out_dir` unless it is empty.
// Library errors end the run and are recorded in the report (exit code 3).
Report dispatch(const RunConfig& cfg, std::string_view verb, const std::filesystem::path& out_dir = {});

}  // namespace odoforge
