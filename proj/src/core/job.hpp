#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "preprocess.hpp"

namespace fda {

enum class PairingMode { kRandom, kFixedCycle };
enum class OutputFormat { kPng, kTensor };

// Where a dataset comes from: a saved manifest file, or a directory + glob.
struct DatasetSource {
  std::filesystem::path root;
  std::string pattern = "*";
  std::optional<std::filesystem::path> manifest_file;

  DatasetManifest resolve() const;
};

struct AdaptJob {
  DatasetSource source;
  DatasetSource target;
  std::vector<double> betas;
  std::uint64_t seed = 0;
  PairingMode pairing = PairingMode::kRandom;
  std::filesystem::path output_dir;
  OutputFormat format = OutputFormat::kPng;
  PreprocessPolicy preprocess;
  unsigned workers = 0;  // 0: hardware concurrency
  unsigned repeats = 1;  // re-pairing passes over the source set
  bool strict_zero = false;

  void validate() const;
};

std::string job_to_json(const AdaptJob& job);
// Missing fields keep their defaults; unknown fields are rejected.
AdaptJob job_from_json(const std::string& text, const AdaptJob& defaults = {});

struct Pair {
  std::size_t source;
  std::size_t target;
  unsigned repeat;
};

// Deterministic pairing. RANDOM draws target indices uniformly from the
// pairing substream of item (repeat * n_source + source); FIXED-CYCLE uses
// source position mod n_target.
std::vector<Pair> pair_stream(PairingMode mode, std::uint64_t seed, std::size_t n_source,
                              std::size_t n_target, unsigned repeats = 1);

std::string output_name(const std::string& source_rel, double beta, const std::string& target_rel,
                        unsigned repeat, unsigned repeats, OutputFormat format);

// Shortest decimal that round-trips, e.g. 0.09, 0, 1.
std::string format_double(double v);

struct ItemReport {
  std::size_t item = 0;  // index into the pair stream
  std::string source;
  std::string target;
  double beta = 0.0;
  std::string output;  // relative to the output directory; empty on failure
  bool ok = false;
  std::string error;
  double max_imaginary_residual = 0.0;
  std::size_t clamp_count = 0;
  double seconds = 0.0;  // share of the pair's processing time
};

struct JobReport {
  std::string config_json;
  std::vector<ItemReport> items;  // ordered by (item, beta position)
  std::size_t outputs = 0;
  std::size_t failures = 0;
  double wall_seconds = 0.0;
  double item_seconds_total = 0.0;
  unsigned workers_used = 0;

  std::string to_json() const;
};

inline constexpr const char* kReportFileName = "fda_report.json";

// Runs every (source, target, beta) triple and writes fda_report.json into the
// output directory. Per-item failures are recorded in the report.
JobReport execute_adapt_job(const AdaptJob& job);

// execute_adapt_job, throwing when every item failed.
JobReport run_adapt_job(const AdaptJob& job);

struct SweepJob {
  std::filesystem::path source;
  std::filesystem::path target;
  std::vector<double> betas;
  std::filesystem::path output_dir;
  bool strict_zero = false;
};

struct SweepEntry {
  double beta = 0.0;
  std::string output;
  double swapped_energy = 0.0;
  double max_imaginary_residual = 0.0;
  std::size_t clamp_count = 0;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  std::string strip;

  std::string to_json() const;
};

// One adapted image per beta plus a left-to-right strip of all of them.
SweepReport run_sweep(const SweepJob& job);

}  // namespace fda
