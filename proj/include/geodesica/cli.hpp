#pragma once

#include "geodesica/manifolds.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace geodesica::cli {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// Entry point of the `geodesica` executable. Failures print
// {"error": code, "message": ...} on stderr and return nonzero.
int run(int argc, char** argv);

// Runs one stage with raw parameters (validated and defaulted here), writes its
// artifacts and manifest.<tag>.json into out_dir, and returns the manifest.
Json run_stage(const std::string& command, const Json& params, const std::filesystem::path& out_dir);

// Runs a RunConfig; an empty stage list writes nothing. Returns the pipeline manifest.
Json run_pipeline(const Json& config);

// Re-executes the run recorded in a manifest and compares output hashes.
Json replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir);

// A preset name ("annulus-narrow", ...), a path to a JSON file, or inline JSON.
Json resolve_manifold_spec(const Json& value);
manifolds::ManifoldOracle manifold_from_json(const Json& spec);

}  // namespace geodesica::cli
