#pragma once

#include <filesystem>
#include <ostream>
#include <string>

namespace impdde::cli {

// Runs the full pipeline for a built-in case, writes its files into outdir
// and prints one PASS/FAIL line per pinned check. Returns the number of
// failed checks.
int reproduce(const std::string& name, const std::filesystem::path& outdir, std::ostream& log);

}  // namespace impdde::cli
