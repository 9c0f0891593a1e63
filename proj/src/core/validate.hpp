#pragma once

#include <filesystem>
#include <string>

namespace fda {

// Checks one file against the invariants of its kind and throws on the first
// violation. kind: auto, tensor, prediction, labels, manifest, job, image.
// Returns a one-line summary.
std::string validate_file(const std::filesystem::path& path, const std::string& kind = "auto");

}  // namespace fda
