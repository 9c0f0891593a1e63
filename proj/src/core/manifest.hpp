#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fda {

struct ManifestEntry {
  std::string path;                  // relative to the manifest root, '/' separated
  std::optional<std::string> label;  // relative to the label root, if any
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;  // byte-wise lexicographic by path

  std::size_t size() const noexcept { return entries.size(); }
  std::filesystem::path absolute(std::size_t i) const { return root / entries.at(i).path; }

  // Unique paths in strictly increasing order.
  void validate() const;
};

// Recursive scan of `root` keeping files whose relative path matches the glob
// `pattern` (fnmatch, '*' crosses directories). Throws on an unreadable root
// or an empty match set.
DatasetManifest build_manifest(const std::filesystem::path& root, const std::string& pattern);

// Attaches `<label_root>/<relative stem><label_suffix>` to every entry whose
// label file exists.
void attach_labels(DatasetManifest& manifest, const std::filesystem::path& label_root,
                   const std::string& label_suffix);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path);

// File name without directories or the final extension.
std::string stem_of(const std::string& relative_path);

}  // namespace fda
