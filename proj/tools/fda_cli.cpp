// fda: batch command-line front end over libfda's C interface.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or validation
// failure.

#include <fda/fda.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Destroy(p); }
};
using ImagePtr = std::unique_ptr<fda_image, Deleter<fda_image, fda_image_destroy>>;
using PredPtr = std::unique_ptr<fda_prediction, Deleter<fda_prediction, fda_prediction_destroy>>;
using LabelsPtr = std::unique_ptr<fda_labels, Deleter<fda_labels, fda_labels_destroy>>;
using ManifestPtr = std::unique_ptr<fda_manifest, Deleter<fda_manifest, fda_manifest_destroy>>;
using JobPtr = std::unique_ptr<fda_job, Deleter<fda_job, fda_job_destroy>>;
using PseudoPtr =
    std::unique_ptr<fda_pseudo_result, Deleter<fda_pseudo_result, fda_pseudo_result_destroy>>;
using MiouPtr = std::unique_ptr<fda_miou_result, Deleter<fda_miou_result, fda_miou_result_destroy>>;

// Carries an exit code out of deeply nested command code.
struct CommandFailure {
  int exit_code;
  std::string message;
};

int exit_code_for(fda_status status) {
  switch (status) {
    case FDA_OK:
      return kExitOk;
    case FDA_ERR_INVALID_ARGUMENT:
    case FDA_ERR_DIMENSION_MISMATCH:
    case FDA_ERR_EMPTY_REDUCTION:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

void check(fda_status status, const std::string& context) {
  if (status == FDA_OK) return;
  throw CommandFailure{exit_code_for(status), context + ": " + fda_last_error()};
}

std::string take_string(char* s) {
  std::string out = s != nullptr ? s : "";
  fda_string_free(s);
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandFailure{kExitRuntime, "cannot read " + path.string()};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text << '\n';
  if (!out) throw CommandFailure{kExitRuntime, "cannot write " + path.string()};
}

std::vector<double> parse_betas(const std::string& text) {
  std::vector<double> betas;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      betas.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CommandFailure{kExitUsage, "not a number in beta list: '" + item + "'"};
    }
  }
  if (betas.empty()) throw CommandFailure{kExitUsage, "empty beta list"};
  return betas;
}

json parse_size(const std::string& text, const char* flag) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    const unsigned long h = std::stoul(text.substr(0, x));
    const unsigned long w = std::stoul(text.substr(x + 1));
    return json::array({h, w});
  } catch (const std::exception&) {
    throw CommandFailure{kExitUsage, std::string(flag) + " expects HEIGHTxWIDTH, got '" + text + "'"};
  }
}

// Relative paths of files under `dir` matching `pattern`, sorted.
std::vector<std::string> list_files(const fs::path& dir, const std::string& pattern) {
  fda_manifest* raw = nullptr;
  check(fda_manifest_build(dir.c_str(), pattern.c_str(), &raw), "listing " + dir.string());
  ManifestPtr m(raw);
  std::vector<std::string> out;
  for (size_t i = 0; i < fda_manifest_count(m.get()); ++i)
    out.emplace_back(fda_manifest_entry(m.get(), i));
  return out;
}

std::string strip_extension(const std::string& rel) {
  fs::path p(rel);
  return (p.parent_path() / p.stem()).generic_string();
}

PredPtr read_prediction(const fs::path& path) {
  fda_prediction* raw = nullptr;
  check(fda_prediction_read(path.c_str(), &raw), "reading " + path.string());
  return PredPtr(raw);
}

LabelsPtr read_labels(const fs::path& path) {
  fda_labels* raw = nullptr;
  check(fda_labels_read(path.c_str(), &raw), "reading " + path.string());
  return LabelsPtr(raw);
}

// ---- adapt ----------------------------------------------------------------

struct AdaptArgs {
  std::string config;
  std::string src, src_pattern, src_manifest;
  std::string tgt, tgt_pattern, tgt_manifest;
  std::optional<double> beta;
  std::string betas;
  std::optional<std::uint64_t> seed;
  std::string pairing;
  std::string out;
  std::string format;
  std::string resize, crop;
  std::optional<unsigned> workers;
  std::optional<unsigned> repeats;
  bool strict_zero = false;
  std::string report;
};

int cmd_adapt(const AdaptArgs& a) {
  json cfg = a.config.empty() ? json::object() : json::parse(read_file(a.config), nullptr, false);
  if (cfg.is_discarded() || !cfg.is_object())
    throw CommandFailure{kExitUsage, "config file is not a JSON object: " + a.config};

  auto set_source = [&](const char* key, const std::string& root, const std::string& pattern,
                        const std::string& manifest) {
    if (!cfg.contains(key)) cfg[key] = json::object();
    if (!root.empty()) cfg[key]["root"] = root;
    if (!pattern.empty()) cfg[key]["pattern"] = pattern;
    if (!manifest.empty()) cfg[key]["manifest"] = manifest;
  };
  set_source("source", a.src, a.src_pattern, a.src_manifest);
  set_source("target", a.tgt, a.tgt_pattern, a.tgt_manifest);
  if (a.beta && !a.betas.empty())
    throw CommandFailure{kExitUsage, "use either --beta or --betas, not both"};
  if (a.beta) cfg["betas"] = json::array({*a.beta});
  if (!a.betas.empty()) cfg["betas"] = parse_betas(a.betas);
  if (a.seed) cfg["seed"] = *a.seed;
  if (!cfg.contains("seed")) {
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    cfg["seed"] = seed;
    std::cerr << "no --seed given; using seed " << seed << "\n";
  }
  if (!a.pairing.empty()) cfg["pairing"] = a.pairing;
  if (!cfg.contains("output")) cfg["output"] = json::object();
  if (!a.out.empty()) cfg["output"]["dir"] = a.out;
  if (!a.format.empty()) cfg["output"]["format"] = a.format;
  if (!a.resize.empty()) cfg["resize"] = parse_size(a.resize, "--resize");
  if (!a.crop.empty()) cfg["crop"] = parse_size(a.crop, "--crop");
  if (a.workers) cfg["workers"] = *a.workers;
  if (a.repeats) cfg["repeats"] = *a.repeats;
  if (a.strict_zero) cfg["strict_zero"] = true;

  fda_job* raw = nullptr;
  check(fda_job_from_json(cfg.dump().c_str(), &raw), "invalid job");
  JobPtr job(raw);
  char* resolved = nullptr;
  check(fda_job_to_json(job.get(), &resolved), "job");
  std::cout << "config " << take_string(resolved) << "\n";

  char* report_raw = nullptr;
  const fda_status status = fda_job_run(job.get(), &report_raw);
  const std::string report_text = take_string(report_raw);
  if (!report_text.empty()) {
    const json report = json::parse(report_text);
    std::cout << "outputs " << report["outputs"] << " failures " << report["failures"]
              << " wall_seconds " << report["wall_seconds"] << " images_per_second "
              << report["throughput_images_per_second"] << "\n";
    for (const auto& item : report["items"])
      if (!item["ok"].get<bool>())
        std::cerr << "failed: " << item["source"].get<std::string>() << ": "
                  << item["error"].get<std::string>() << "\n";
    if (!a.report.empty()) write_file(a.report, report_text);
  }
  check(status, "adapt");
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(const std::string& src, const std::string& tgt, const std::string& betas,
              const std::string& out, bool strict_zero) {
  const json cfg{{"source", src},
                 {"target", tgt},
                 {"betas", parse_betas(betas)},
                 {"output_dir", out},
                 {"strict_zero", strict_zero}};
  std::cout << "config " << cfg.dump() << "\n";
  char* report = nullptr;
  check(fda_sweep_run(cfg.dump().c_str(), &report), "sweep");
  std::cout << take_string(report) << "\n";
  return kExitOk;
}

// ---- ensemble -------------------------------------------------------------

struct EnsembleArgs {
  std::vector<std::string> pred_dirs;
  std::string out;
  double top_fraction = 0.66;
  double confidence_floor = 0.9;
  std::string scope = "batch";
};

int cmd_ensemble(const EnsembleArgs& a) {
  fda_ensemble_config cfg = fda_ensemble_config_default();
  cfg.top_fraction = a.top_fraction;
  cfg.confidence_floor = a.confidence_floor;
  if (a.scope == "batch")
    cfg.scope = FDA_SCOPE_PER_CLASS_OVER_BATCH;
  else if (a.scope == "image")
    cfg.scope = FDA_SCOPE_PER_IMAGE;
  else
    throw CommandFailure{kExitUsage, "--scope must be 'batch' or 'image'"};

  json echo{{"prediction_dirs", a.pred_dirs},
            {"top_fraction", cfg.top_fraction},
            {"confidence_floor", cfg.confidence_floor},
            {"scope", a.scope},
            {"output_dir", a.out}};
  std::cout << "config " << echo.dump() << "\n";

  const auto names = list_files(a.pred_dirs.front(), "*.json");
  std::vector<PredPtr> means;
  for (const auto& name : names) {
    std::vector<PredPtr> members;
    std::vector<const fda_prediction*> views;
    for (const auto& dir : a.pred_dirs) {
      const fs::path path = fs::path(dir) / name;
      if (!fs::exists(path))
        throw CommandFailure{kExitUsage, "missing " + path.string() + " (present in " +
                                             a.pred_dirs.front() + ")"};
      members.push_back(read_prediction(path));
      views.push_back(members.back().get());
      const auto* first = views.front();
      const auto* last = views.back();
      if (fda_prediction_height(first) != fda_prediction_height(last) ||
          fda_prediction_width(first) != fda_prediction_width(last) ||
          fda_prediction_classes(first) != fda_prediction_classes(last))
        throw CommandFailure{kExitUsage, "dimension mismatch between " +
                                             (fs::path(a.pred_dirs.front()) / name).string() +
                                             " and " + path.string()};
    }
    fda_prediction* mean = nullptr;
    check(fda_mean_prediction(views.data(), views.size(), &mean), "averaging " + name);
    means.emplace_back(mean);
  }

  std::vector<const fda_prediction*> views;
  for (const auto& m : means) views.push_back(m.get());
  fda_pseudo_result* raw = nullptr;
  check(fda_pseudo_labels(views.data(), views.size(), &cfg, &raw), "pseudo labels");
  PseudoPtr result(raw);

  fs::create_directories(a.out);
  for (size_t i = 0; i < names.size(); ++i) {
    const fs::path base = fs::path(a.out) / strip_extension(names[i]);
    fs::create_directories(base.parent_path());
    const fda_labels* labels = fda_pseudo_result_labels(result.get(), i);
    check(fda_labels_write(labels, base.c_str()), "writing " + base.string());
    const fs::path png = fs::path(base.string() + ".png");
    check(fda_labels_write_png(labels, png.c_str()), "writing " + png.string());
  }

  json report = echo;
  report["images"] = names.size();
  report["kept_fraction"] = json::array();
  report["mean_confidence"] = json::array();
  for (size_t k = 0; k < fda_pseudo_result_classes(result.get()); ++k) {
    report["kept_fraction"].push_back(fda_pseudo_result_kept_fraction(result.get(), k));
    report["mean_confidence"].push_back(fda_pseudo_result_mean_confidence(result.get(), k));
  }
  write_file(fs::path(a.out) / "fda_ensemble_report.json", report.dump(2));
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

// ---- loss -----------------------------------------------------------------

struct LossArgs {
  std::string kind;
  std::string pred, labels;
  std::string src_pred, src_labels, tgt_pred, pseudo_pred, pseudo_labels;
  double eta = 2.0;
  double lambda_ent = 0.005;
  std::string reduction = "mean";
  std::string report;
};

int cmd_loss(const LossArgs& a) {
  fda_loss_config cfg = fda_loss_config_default();
  cfg.eta = a.eta;
  cfg.lambda_ent = a.lambda_ent;
  if (a.reduction == "mean")
    cfg.reduction = FDA_REDUCTION_MEAN;
  else if (a.reduction == "sum")
    cfg.reduction = FDA_REDUCTION_SUM;
  else
    throw CommandFailure{kExitUsage, "--reduction must be 'mean' or 'sum'"};

  auto need = [](const std::string& v, const char* flag) {
    if (v.empty()) throw CommandFailure{kExitUsage, std::string(flag) + " is required"};
    return v;
  };
  auto ce = [&](const std::string& pred, const std::string& labels) {
    PredPtr p = read_prediction(pred);
    LabelsPtr l = read_labels(labels);
    double v = 0.0;
    check(fda_cross_entropy(p.get(), l.get(), cfg.reduction, &v), "cross entropy of " + pred);
    return v;
  };
  auto entropy = [&](const std::string& pred) {
    PredPtr p = read_prediction(pred);
    double v = 0.0;
    check(fda_robust_entropy(p.get(), &cfg, &v), "robust entropy of " + pred);
    return v;
  };

  json out{{"kind", a.kind},
           {"eta", cfg.eta},
           {"lambda_ent", cfg.lambda_ent},
           {"epsilon", cfg.epsilon},
           {"reduction", a.reduction}};
  double value = 0.0;
  if (a.kind == "ce") {
    value = ce(need(a.pred, "--pred"), need(a.labels, "--labels"));
  } else if (a.kind == "entropy") {
    value = entropy(need(a.pred, "--pred"));
  } else if (a.kind == "combined" || a.kind == "sst") {
    const double src_ce = ce(need(a.src_pred, "--src-pred"), need(a.src_labels, "--src-labels"));
    const double tgt_ent = entropy(need(a.tgt_pred, "--tgt-pred"));
    out["source_ce"] = src_ce;
    out["target_entropy"] = tgt_ent;
    if (a.kind == "combined") {
      check(fda_combined_loss(src_ce, tgt_ent, &cfg, &value), "combined loss");
    } else {
      const double pseudo_ce =
          ce(need(a.pseudo_pred, "--pseudo-pred"), need(a.pseudo_labels, "--pseudo-labels"));
      out["pseudo_ce"] = pseudo_ce;
      check(fda_sst_loss(src_ce, tgt_ent, pseudo_ce, &cfg, &value), "sst loss");
    }
  } else {
    throw CommandFailure{kExitUsage, "loss kind must be ce, entropy, combined, or sst"};
  }
  out["value"] = value;
  std::cout << out.dump() << "\n";
  if (!a.report.empty()) write_file(a.report, out.dump(2));
  return kExitOk;
}

// ---- miou -----------------------------------------------------------------

int cmd_miou(const std::string& pred_dir, const std::string& gt_dir, std::size_t classes,
             const std::string& pattern, const std::string& report_path) {
  json echo{{"pred_dir", pred_dir}, {"gt_dir", gt_dir}, {"classes", classes}, {"pattern", pattern}};
  std::cout << "config " << echo.dump() << "\n";
  const auto names = list_files(gt_dir, pattern);
  std::vector<LabelsPtr> preds, gts;
  for (const auto& name : names) {
    const fs::path gt_path = fs::path(gt_dir) / name;
    fs::path pred_path = fs::path(pred_dir) / name;
    if (!fs::exists(pred_path)) {
      // Accept the other encoding for the same stem.
      const std::string stem = strip_extension(name);
      for (const char* ext : {".json", ".png"})
        if (fs::exists(fs::path(pred_dir) / (stem + ext))) pred_path = fs::path(pred_dir) / (stem + ext);
    }
    if (!fs::exists(pred_path))
      throw CommandFailure{kExitUsage, "no prediction for " + gt_path.string()};
    gts.push_back(read_labels(gt_path));
    preds.push_back(read_labels(pred_path));
    if (fda_labels_height(gts.back().get()) != fda_labels_height(preds.back().get()) ||
        fda_labels_width(gts.back().get()) != fda_labels_width(preds.back().get()))
      throw CommandFailure{kExitUsage, "dimension mismatch between " + pred_path.string() +
                                           " and " + gt_path.string()};
  }
  std::vector<const fda_labels*> pv, gv;
  for (size_t i = 0; i < names.size(); ++i) {
    pv.push_back(preds[i].get());
    gv.push_back(gts[i].get());
  }
  fda_miou_result* raw = nullptr;
  check(fda_compute_miou(pv.data(), gv.data(), names.size(), classes, &raw), "miou");
  MiouPtr result(raw);

  json report = echo;
  report["iou"] = json::array();
  std::printf("%-8s %s\n", "class", "IoU");
  for (size_t k = 0; k < classes; ++k) {
    double iou = 0.0;
    if (fda_miou_result_iou(result.get(), k, &iou)) {
      std::printf("%-8zu %.4f\n", k, iou);
      report["iou"].push_back(iou);
    } else {
      std::printf("%-8zu %s\n", k, "-");
      report["iou"].push_back(nullptr);
    }
  }
  const double mean = fda_miou_result_mean(result.get());
  std::printf("%-8s %.4f\n", "mean", mean);
  report["mean_iou"] = mean;
  std::cout << "mean_iou " << json(mean).dump() << "\n";
  if (!report_path.empty()) write_file(report_path, report.dump(2));
  return kExitOk;
}

// ---- validate -------------------------------------------------------------

int cmd_validate(const std::string& path, const std::string& kind) {
  char* message = nullptr;
  const fda_status status = fda_validate_file(path.c_str(), kind.c_str(), &message);
  const std::string text = take_string(message);
  if (status != FDA_OK) {
    std::cerr << path << ": " << text << "\n";
    return status == FDA_ERR_IO ? kExitRuntime : kExitUsage;
  }
  std::cout << path << ": " << text << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier domain adaptation toolkit (libfda " + std::string(fda_version()) + ")"};
  app.require_subcommand(1);

  AdaptArgs adapt;
  auto* a = app.add_subcommand("adapt", "Build a source-in-target-style dataset");
  a->add_option("--config", adapt.config, "JSON job config; flags override its fields");
  a->add_option("--src", adapt.src, "Source image directory");
  a->add_option("--src-pattern", adapt.src_pattern, "Glob for source files (default *)");
  a->add_option("--src-manifest", adapt.src_manifest, "Saved source manifest");
  a->add_option("--tgt", adapt.tgt, "Target image directory");
  a->add_option("--tgt-pattern", adapt.tgt_pattern, "Glob for target files (default *)");
  a->add_option("--tgt-manifest", adapt.tgt_manifest, "Saved target manifest");
  a->add_option("--beta", adapt.beta, "Single band size in [0, 1]");
  a->add_option("--betas", adapt.betas, "Comma-separated band sizes, e.g. 0.01,0.05,0.09");
  a->add_option("--seed", adapt.seed, "Pairing/crop seed (random and printed if omitted)");
  a->add_option("--pairing", adapt.pairing, "random | fixed-cycle");
  a->add_option("--out", adapt.out, "Output directory");
  a->add_option("--format", adapt.format, "png | tensor");
  a->add_option("--resize", adapt.resize, "Resize before transfer, HEIGHTxWIDTH");
  a->add_option("--crop", adapt.crop, "Random crop after resize, HEIGHTxWIDTH");
  a->add_option("--workers", adapt.workers, "Worker threads (default: all cores)");
  a->add_option("--repeats", adapt.repeats, "Re-pairing passes over the source set");
  a->add_flag("--strict-zero", adapt.strict_zero, "beta = 0 leaves images untouched");
  a->add_option("--report", adapt.report, "Also write the JSON report here");

  std::string sweep_src, sweep_tgt, sweep_betas, sweep_out;
  bool sweep_strict = false;
  auto* s = app.add_subcommand("sweep", "Adapt one pair over several betas plus a strip");
  s->add_option("--src", sweep_src, "Source image")->required();
  s->add_option("--tgt", sweep_tgt, "Target image")->required();
  s->add_option("--betas", sweep_betas, "Comma-separated band sizes")->required();
  s->add_option("--out", sweep_out, "Output directory")->required();
  s->add_flag("--strict-zero", sweep_strict, "beta = 0 leaves the image untouched");

  EnsembleArgs ens;
  auto* e = app.add_subcommand("ensemble", "Average predictions and emit filtered pseudo labels");
  e->add_option("--pred", ens.pred_dirs, "Prediction directory (repeat per model)")->required();
  e->add_option("--out", ens.out, "Output directory")->required();
  e->add_option("--top-fraction", ens.top_fraction, "Per-class rank fraction kept (0.66)");
  e->add_option("--confidence-floor", ens.confidence_floor, "Always keep above this (0.9)");
  e->add_option("--scope", ens.scope, "batch | image");

  LossArgs loss;
  auto* l = app.add_subcommand("loss", "Evaluate a loss kernel on tensor files");
  l->add_option("kind", loss.kind, "ce | entropy | combined | sst")->required();
  l->add_option("--pred", loss.pred, "Prediction tensor (ce, entropy)");
  l->add_option("--labels", loss.labels, "Label tensor or PNG (ce)");
  l->add_option("--src-pred", loss.src_pred, "Source prediction (combined, sst)");
  l->add_option("--src-labels", loss.src_labels, "Source labels (combined, sst)");
  l->add_option("--tgt-pred", loss.tgt_pred, "Target prediction (combined, sst)");
  l->add_option("--pseudo-pred", loss.pseudo_pred, "Target prediction scored on pseudo labels");
  l->add_option("--pseudo-labels", loss.pseudo_labels, "Pseudo labels (sst)");
  l->add_option("--eta", loss.eta, "Charbonnier exponent (2.0)");
  l->add_option("--lambda-ent", loss.lambda_ent, "Entropy weight (0.005)");
  l->add_option("--reduction", loss.reduction, "mean | sum");
  l->add_option("--report", loss.report, "Also write the JSON result here");

  std::string miou_pred, miou_gt, miou_pattern = "*", miou_report;
  std::size_t miou_classes = 0;
  auto* m = app.add_subcommand("miou", "Mean intersection over union of label maps");
  m->add_option("--pred", miou_pred, "Predicted label directory")->required();
  m->add_option("--gt", miou_gt, "Ground-truth label directory")->required();
  m->add_option("--classes", miou_classes, "Class count")->required();
  m->add_option("--pattern", miou_pattern, "Glob for ground-truth files (default *)");
  m->add_option("--report", miou_report, "Also write the JSON result here");

  std::string validate_path, validate_kind = "auto";
  auto* v = app.add_subcommand("validate", "Check a tensor, manifest, job config, or image");
  v->add_option("path", validate_path, "File to check")->required();
  v->add_option("--kind", validate_kind,
                "auto | tensor | prediction | labels | manifest | job | report | image");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (a->parsed()) return cmd_adapt(adapt);
    if (s->parsed()) return cmd_sweep(sweep_src, sweep_tgt, sweep_betas, sweep_out, sweep_strict);
    if (e->parsed()) return cmd_ensemble(ens);
    if (l->parsed()) return cmd_loss(loss);
    if (m->parsed()) return cmd_miou(miou_pred, miou_gt, miou_classes, miou_pattern, miou_report);
    if (v->parsed()) return cmd_validate(validate_path, validate_kind);
  } catch (const CommandFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
