#include "job.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <future>
#include <json.hpp>
#include <list>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "error.hpp"
#include "image_io.hpp"
#include "rng.hpp"
#include "tensor_io.hpp"
#include "transfer.hpp"

namespace fda {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kTargetCacheSize = 8;

DatasetManifest DatasetSource::resolve() const {
  if (manifest_file) return load_manifest(*manifest_file);
  return build_manifest(root, pattern);
}

void AdaptJob::validate() const {
  if (betas.empty()) throw invalid_argument("at least one beta is required");
  for (double b : betas) validate_beta(b);
  if (output_dir.empty()) throw invalid_argument("an output directory is required");
  if (repeats == 0) throw invalid_argument("repeats must be at least 1");
  if (preprocess.resize && (preprocess.resize->height == 0 || preprocess.resize->width == 0))
    throw invalid_argument("resize dims must be positive");
  if (preprocess.crop && (preprocess.crop->height == 0 || preprocess.crop->width == 0))
    throw invalid_argument("crop dims must be positive");
}

namespace {

json source_to_json(const DatasetSource& s) {
  json j{{"root", s.root.generic_string()}, {"pattern", s.pattern}};
  if (s.manifest_file) j["manifest"] = s.manifest_file->generic_string();
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) ==
        known.end())
      throw invalid_argument(std::string("unknown field '") + key + "' in " + where);
  }
}

DatasetSource source_from_json(const json& j, DatasetSource s, const char* where) {
  if (!j.is_object()) throw invalid_argument(std::string(where) + " must be an object");
  reject_unknown(j, {"root", "pattern", "manifest"}, where);
  if (j.contains("root")) s.root = j["root"].get<std::string>();
  if (j.contains("pattern")) s.pattern = j["pattern"].get<std::string>();
  if (j.contains("manifest")) {
    if (j["manifest"].is_null())
      s.manifest_file.reset();
    else
      s.manifest_file = j["manifest"].get<std::string>();
  }
  return s;
}

json size_to_json(const std::optional<Size2>& s) {
  if (!s) return nullptr;
  return json::array({s->height, s->width});
}

std::optional<Size2> size_from_json(const json& j, const char* where) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned())
    throw invalid_argument(std::string(where) + " must be [height, width] or null");
  return Size2{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

}  // namespace

std::string job_to_json(const AdaptJob& job) {
  json j;
  j["source"] = source_to_json(job.source);
  j["target"] = source_to_json(job.target);
  j["betas"] = job.betas;
  j["seed"] = job.seed;
  j["pairing"] = job.pairing == PairingMode::kRandom ? "random" : "fixed-cycle";
  j["output"] = {{"dir", job.output_dir.generic_string()},
                 {"format", job.format == OutputFormat::kPng ? "png" : "tensor"}};
  j["resize"] = size_to_json(job.preprocess.resize);
  j["crop"] = size_to_json(job.preprocess.crop);
  j["workers"] = job.workers;
  j["repeats"] = job.repeats;
  j["strict_zero"] = job.strict_zero;
  j["rng"] = kRngAlgorithm;
  return j.dump(2);
}

AdaptJob job_from_json(const std::string& text, const AdaptJob& defaults) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("job config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw invalid_argument("job config must be a JSON object");
  reject_unknown(j,
                 {"source", "target", "betas", "seed", "pairing", "output", "resize", "crop",
                  "workers", "repeats", "strict_zero", "rng"},
                 "job config");
  AdaptJob job = defaults;
  try {
    if (j.contains("source")) job.source = source_from_json(j["source"], job.source, "source");
    if (j.contains("target")) job.target = source_from_json(j["target"], job.target, "target");
    if (j.contains("betas")) job.betas = j["betas"].get<std::vector<double>>();
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned())
        throw invalid_argument("seed must be a non-negative 64-bit integer");
      job.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("pairing")) {
      const auto p = j["pairing"].get<std::string>();
      if (p == "random")
        job.pairing = PairingMode::kRandom;
      else if (p == "fixed-cycle")
        job.pairing = PairingMode::kFixedCycle;
      else
        throw invalid_argument("pairing must be 'random' or 'fixed-cycle'");
    }
    if (j.contains("output")) {
      const json& o = j["output"];
      if (!o.is_object()) throw invalid_argument("output must be an object");
      reject_unknown(o, {"dir", "format"}, "output");
      if (o.contains("dir")) job.output_dir = o["dir"].get<std::string>();
      if (o.contains("format")) {
        const auto f = o["format"].get<std::string>();
        if (f == "png")
          job.format = OutputFormat::kPng;
        else if (f == "tensor")
          job.format = OutputFormat::kTensor;
        else
          throw invalid_argument("output.format must be 'png' or 'tensor'");
      }
    }
    if (j.contains("resize")) job.preprocess.resize = size_from_json(j["resize"], "resize");
    if (j.contains("crop")) job.preprocess.crop = size_from_json(j["crop"], "crop");
    if (j.contains("workers")) job.workers = j["workers"].get<unsigned>();
    if (j.contains("repeats")) job.repeats = j["repeats"].get<unsigned>();
    if (j.contains("strict_zero")) job.strict_zero = j["strict_zero"].get<bool>();
    if (j.contains("rng") && j["rng"].get<std::string>() != kRngAlgorithm)
      throw invalid_argument(std::string("config was written for rng '") +
                             j["rng"].get<std::string>() + "', this build uses " +
                             kRngAlgorithm);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("job config field has the wrong type: ") + e.what());
  }
  return job;
}

std::vector<Pair> pair_stream(PairingMode mode, std::uint64_t seed, std::size_t n_source,
                              std::size_t n_target, unsigned repeats) {
  if (n_source == 0 || n_target == 0) throw invalid_argument("pairing needs non-empty datasets");
  std::vector<Pair> pairs;
  pairs.reserve(n_source * repeats);
  for (unsigned r = 0; r < repeats; ++r) {
    for (std::size_t i = 0; i < n_source; ++i) {
      const std::uint64_t item = static_cast<std::uint64_t>(r) * n_source + i;
      std::size_t t = 0;
      if (mode == PairingMode::kRandom) {
        auto rng = SplitMix64::substream(seed, RngStream::kPairing, item);
        t = static_cast<std::size_t>(rng.uniform(n_target));
      } else {
        t = static_cast<std::size_t>(item % n_target);
      }
      pairs.push_back({i, t, r});
    }
  }
  return pairs;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string output_name(const std::string& source_rel, double beta, const std::string& target_rel,
                        unsigned repeat, unsigned repeats, OutputFormat format) {
  const fs::path rel(source_rel);
  std::string name = rel.stem().string() + "__b" + format_double(beta) + "__t" + stem_of(target_rel);
  if (repeats > 1) name += "__r" + std::to_string(repeat);
  name += format == OutputFormat::kPng ? ".png" : ".bin";
  return (rel.parent_path() / name).generic_string();
}

namespace {

RasterImage to_rgb(const RasterImage& gray) {
  RasterImage out(gray.height(), gray.width(), 3);
  for (std::size_t h = 0; h < gray.height(); ++h)
    for (std::size_t w = 0; w < gray.width(); ++w)
      for (std::size_t c = 0; c < 3; ++c) out.at(h, w, c) = gray.at(h, w, 0);
  return out;
}

// Brings the target to the source's working size and channel count.
void conform(RasterImage& source, RasterImage& target) {
  if (source.channels() != target.channels()) {
    if (source.channels() == 1) source = to_rgb(source);
    if (target.channels() == 1) target = to_rgb(target);
  }
  target = resize_bilinear(target, Size2{source.height(), source.width()});
}

// Target spectra shared across items. Bounded so large target sets do not
// hold every spectrum in memory; entries are evicted least recently used.
class TargetSpectra {
 public:
  using Spectra = std::shared_ptr<const std::vector<ChannelSpectrum>>;
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;

  explicit TargetSpectra(std::size_t capacity) : capacity_(capacity) {}

  template <typename Compute>
  Spectra get(const Key& key, Compute&& compute) {
    std::shared_future<Spectra> future;
    std::promise<Spectra> promise;
    bool owner = false;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = std::find_if(entries_.begin(), entries_.end(),
                             [&](const auto& e) { return e.first == key; });
      if (it != entries_.end()) {
        entries_.splice(entries_.begin(), entries_, it);
        future = it->second;
      } else {
        future = promise.get_future().share();
        entries_.emplace_front(key, future);
        if (entries_.size() > capacity_) entries_.pop_back();
        owner = true;
      }
    }
    if (owner) {
      try {
        promise.set_value(std::make_shared<const std::vector<ChannelSpectrum>>(compute()));
      } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard<std::mutex> lock(mutex_);
        std::erase_if(entries_, [&](const auto& e) { return e.first == key; });
      }
    }
    return future.get();
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::list<std::pair<Key, std::shared_future<Spectra>>> entries_;
};

void write_output(const fs::path& path, const RasterImage& image, OutputFormat format) {
  fs::create_directories(path.parent_path());
  if (format == OutputFormat::kPng)
    save_png(path, image);
  else
    write_image_tensor(path, image);
}

json item_to_json(const ItemReport& r) {
  json j{{"item", r.item},
         {"source", r.source},
         {"target", r.target},
         {"beta", r.beta},
         {"ok", r.ok},
         {"seconds", r.seconds}};
  if (r.ok) {
    j["output"] = r.output;
    j["max_imaginary_residual"] = r.max_imaginary_residual;
    j["clamp_count"] = r.clamp_count;
  } else {
    j["error"] = r.error;
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out << text << '\n';
  if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace

std::string JobReport::to_json() const {
  json j;
  j["config"] = json::parse(config_json);
  j["rng"] = kRngAlgorithm;
  j["outputs"] = outputs;
  j["failures"] = failures;
  j["wall_seconds"] = wall_seconds;
  j["item_seconds_total"] = item_seconds_total;
  j["workers"] = workers_used;
  j["throughput_images_per_second"] =
      wall_seconds > 0.0 ? static_cast<double>(outputs) / wall_seconds : 0.0;
  j["items"] = json::array();
  for (const auto& r : items) j["items"].push_back(item_to_json(r));
  return j.dump(2);
}

JobReport execute_adapt_job(const AdaptJob& job) {
  job.validate();
  const auto start = Clock::now();
  const DatasetManifest sources = job.source.resolve();
  const DatasetManifest targets = job.target.resolve();
  const std::vector<Pair> pairs =
      pair_stream(job.pairing, job.seed, sources.size(), targets.size(), job.repeats);
  fs::create_directories(job.output_dir);

  unsigned workers = job.workers != 0 ? job.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, pairs.size()));

  const TransferOptions options{job.strict_zero, true};
  const std::size_t n_source = sources.size();
  TargetSpectra target_spectra(kTargetCacheSize);

  // Each worker fills its own partial list; merged and sorted afterwards.
  auto process = [&](std::size_t item, std::vector<ItemReport>& out) {
    const Pair& pair = pairs[item];
    const auto& src_rel = sources.entries[pair.source].path;
    const auto& tgt_rel = targets.entries[pair.target].path;
    const auto t0 = Clock::now();
    std::vector<ItemReport> local;
    for (double beta : job.betas) {
      ItemReport r;
      r.item = item;
      r.source = src_rel;
      r.target = tgt_rel;
      r.beta = beta;
      local.push_back(std::move(r));
    }
    try {
      RasterImage source = preprocess(load_image(sources.absolute(pair.source)), job.preprocess,
                                      job.seed,
                                      static_cast<std::uint64_t>(pair.repeat) * n_source +
                                          pair.source);
      const auto target = target_spectra.get(
          {pair.target, source.height(), source.width(), source.channels()}, [&] {
            RasterImage t = load_image(targets.absolute(pair.target));
            if (job.preprocess.resize) t = resize_bilinear(t, *job.preprocess.resize);
            RasterImage s(source.height(), source.width(), source.channels());
            conform(s, t);
            return forward_fft(t);
          });
      if (source.channels() < target->size()) source = to_rgb(source);
      const auto spectra = forward_fft(source);
      for (auto& r : local) {
        const TransferResult tr = transfer_spectra(spectra, *target, r.beta, options);
        r.output = output_name(src_rel, r.beta, tgt_rel, pair.repeat, job.repeats, job.format);
        write_output(job.output_dir / r.output, tr.adapted, job.format);
        r.ok = true;
        r.max_imaginary_residual = tr.max_imaginary_residual;
        r.clamp_count = tr.clamp_count;
      }
    } catch (const std::exception& e) {
      for (auto& r : local)
        if (!r.ok) {
          r.output.clear();
          r.error = e.what();
        }
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    for (auto& r : local) {
      r.seconds = seconds / static_cast<double>(local.size());
      out.push_back(std::move(r));
    }
  };

  std::vector<std::vector<ItemReport>> partial(workers);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t item = next++; item < pairs.size(); item = next++)
          process(item, partial[w]);
      });
  }

  JobReport report;
  report.config_json = job_to_json(job);
  report.workers_used = workers;
  for (auto& part : partial)
    for (auto& r : part) report.items.push_back(std::move(r));
  std::stable_sort(report.items.begin(), report.items.end(),
                   [](const ItemReport& a, const ItemReport& b) { return a.item < b.item; });
  for (const auto& r : report.items) {
    (r.ok ? report.outputs : report.failures) += 1;
    report.item_seconds_total += r.seconds;
  }
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  write_text(job.output_dir / kReportFileName, report.to_json());
  return report;
}

JobReport run_adapt_job(const AdaptJob& job) {
  JobReport report = execute_adapt_job(job);
  if (report.outputs == 0)
    throw io_error("every item failed; first error: " +
                   (report.items.empty() ? std::string("none") : report.items.front().error));
  return report;
}

std::string SweepReport::to_json() const {
  json j;
  j["strip"] = strip;
  j["entries"] = json::array();
  for (const auto& e : entries)
    j["entries"].push_back({{"beta", e.beta},
                            {"output", e.output},
                            {"swapped_energy", e.swapped_energy},
                            {"max_imaginary_residual", e.max_imaginary_residual},
                            {"clamp_count", e.clamp_count}});
  return j.dump(2);
}

SweepReport run_sweep(const SweepJob& job) {
  if (job.betas.empty()) throw invalid_argument("at least one beta is required");
  for (double b : job.betas) validate_beta(b);
  RasterImage source = load_image(job.source);
  RasterImage target = load_image(job.target);
  conform(source, target);
  const PreparedPair prepared = prepare_pair(source, target);
  fs::create_directories(job.output_dir);

  const std::string src_name = job.source.filename().string();
  const std::string tgt_name = job.target.filename().string();
  SweepReport report;
  std::vector<RasterImage> panels;
  for (double beta : job.betas) {
    const TransferResult tr = transfer_prepared(prepared, beta, {job.strict_zero, true});
    SweepEntry e;
    e.beta = beta;
    e.output = output_name(src_name, beta, tgt_name, 0, 1, OutputFormat::kPng);
    save_png(job.output_dir / e.output, tr.adapted);
    e.swapped_energy = (job.strict_zero && beta == 0.0)
                           ? 0.0
                           : swapped_energy(prepared, build_mask(source.height(), source.width(), beta));
    e.max_imaginary_residual = tr.max_imaginary_residual;
    e.clamp_count = tr.clamp_count;
    report.entries.push_back(std::move(e));
    panels.push_back(tr.adapted);
  }
  report.strip = stem_of(src_name) + "__sweep.png";
  save_png(job.output_dir / report.strip, hconcat(panels));
  write_text(job.output_dir / "fda_sweep_report.json", report.to_json());
  return report;
}

}  // namespace fda
