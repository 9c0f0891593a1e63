#include "manifest.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <system_error>

#include "error.hpp"

namespace fda {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetManifest::validate() const {
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (!(entries[i - 1].path < entries[i].path))
      throw invalid_argument("manifest entries are not unique and sorted at index " +
                             std::to_string(i) + " (" + entries[i].path + ")");
  for (const auto& e : entries)
    if (e.path.empty()) throw invalid_argument("manifest entry with an empty path");
}

DatasetManifest build_manifest(const fs::path& root, const std::string& pattern) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw io_error("manifest root is not a readable directory: " +
                                                  root.string());
  DatasetManifest m;
  m.root = root;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw io_error("cannot read " + root.string() + ": " + ec.message());
  for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) throw io_error("cannot read " + root.string() + ": " + ec.message());
    if (!it->is_regular_file(ec)) continue;
    const std::string rel = fs::relative(it->path(), root, ec).generic_string();
    if (::fnmatch(pattern.c_str(), rel.c_str(), 0) == 0) m.entries.push_back({rel, std::nullopt});
  }
  if (m.entries.empty())
    throw io_error("no files under " + root.string() + " match '" + pattern + "'");
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return m;
}

std::string stem_of(const std::string& relative_path) {
  return fs::path(relative_path).stem().string();
}

void attach_labels(DatasetManifest& manifest, const fs::path& label_root,
                   const std::string& label_suffix) {
  for (auto& e : manifest.entries) {
    const fs::path rel(e.path);
    const std::string candidate = (rel.parent_path() / (rel.stem().string() + label_suffix))
                                      .generic_string();
    std::error_code ec;
    if (fs::is_regular_file(label_root / candidate, ec)) e.label = candidate;
  }
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json j;
  j["format"] = "fda-manifest";
  j["version"] = 1;
  j["root"] = manifest.root.generic_string();
  j["entries"] = json::array();
  for (const auto& e : manifest.entries) {
    json entry{{"path", e.path}};
    if (e.label) entry["label"] = *e.label;
    j["entries"].push_back(entry);
  }
  return j.dump(2);
}

DatasetManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "fda-manifest")
    throw invalid_argument("not an fda-manifest document");
  if (j.value("version", 0) != 1) throw invalid_argument("unsupported manifest version");
  if (!j.contains("root") || !j["root"].is_string() || !j.contains("entries") ||
      !j["entries"].is_array())
    throw invalid_argument("manifest needs a string 'root' and an 'entries' array");
  DatasetManifest m;
  m.root = j["root"].get<std::string>();
  for (const auto& e : j["entries"]) {
    if (!e.is_object() || !e.contains("path") || !e["path"].is_string())
      throw invalid_argument("manifest entry without a string 'path'");
    ManifestEntry entry{e["path"].get<std::string>(), std::nullopt};
    if (e.contains("label")) entry.label = e["label"].get<std::string>();
    m.entries.push_back(std::move(entry));
  }
  m.validate();
  return m;
}

void save_manifest(const fs::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << manifest_to_json(manifest) << '\n';
  if (!out) throw io_error("write failed for " + path.string());
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

}  // namespace fda
