#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace qrpinn::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // numeric failure or I/O error
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInterrupted = 130;

inline constexpr const char* kManifestName = "manifest.json";

// One CLI invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Runs a subcommand from its fully resolved config, writing outputs and the manifest into
// out_dir. This is what `replay` calls with a manifest's config.
int execute(const std::string& subcommand, const nlohmann::json& config, const std::filesystem::path& out_dir,
            std::ostream& out, std::ostream& err);

// Write to a sibling temp file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace qrpinn::cli
