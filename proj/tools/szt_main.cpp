#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "szt/cli.hpp"
#include "szt/errors.hpp"
#include "szt/log.hpp"

namespace {

struct Flags {
  std::optional<std::string> config, manifest, out, cache_dir, run_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers, method, fmax, folds, sweep_fold;
  std::optional<double> wl, overlap, target_fs, separability;
  std::optional<std::string> classifier, cv;
  std::vector<std::string> classifiers;
  std::optional<std::size_t> budget, top;
  bool no_standardize = false;
  bool shared_patients = false;
  bool quiet = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--manifest", f.manifest, "Seizure manifest CSV");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--cache-dir", f.cache_dir, "Feature cache directory (default <out>/cache)");
  cmd->add_option("--seed", f.seed, "Seed for folds, models, search and synthesis");
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--method", f.method, "Feature method")->check(CLI::IsMember({1, 2}));
  cmd->add_option("--fmax", f.fmax, "Upper frequency bound in Hz");
  cmd->add_option("--wl", f.wl, "Window length W_l in seconds");
  cmd->add_option("--overlap", f.overlap, "Overlap as a fraction of W_l")->check(CLI::IsMember({0.5, 0.75}));
  cmd->add_option("--target-fs", f.target_fs, "Common sampling rate after ingestion");
  cmd->add_option("--classifier", f.classifier, "knn, sgd or gbt")->check(CLI::IsMember({"knn", "sgd", "gbt"}));
  cmd->add_option("--classifiers", f.classifiers, "Several classifiers (cv, sweep)")
      ->check(CLI::IsMember({"knn", "sgd", "gbt"}))
      ->delimiter(',');
  cmd->add_option("--cv", f.cv, "seizure or patient")->check(CLI::IsMember({"seizure", "patient"}));
  cmd->add_option("--folds", f.folds, "Fold count K");
  cmd->add_option("--budget", f.budget, "Search trials per grid point");
  cmd->add_option("--sweep-fold", f.sweep_fold, "Fold index each sweep point is scored on");
  cmd->add_option("--top", f.top, "Number of top grid points to keep");
  cmd->add_flag("--no-standardize", f.no_standardize, "Skip per-fold feature standardization");
  cmd->add_flag("--quiet", f.quiet, "Suppress log output");
}

szt::cli::RunConfig resolve(const std::string& command, const Flags& f) {
  szt::cli::RunConfig c = f.config ? szt::cli::load_config(*f.config) : szt::cli::RunConfig{};
  if (f.manifest) c.manifest = *f.manifest;
  if (f.out) c.out = *f.out;
  if (f.cache_dir) c.cache_dir = *f.cache_dir;
  if (f.run_dir) c.run_dir = *f.run_dir;
  if (f.seed) {
    c.seed = *f.seed;
    if (command == "synth") c.genspec.seed = *f.seed;
  }
  if (f.workers) c.workers = *f.workers;
  if (f.method) c.method = static_cast<szt::FeatureMethod>(*f.method);
  if (f.fmax) c.fmax_hz = *f.fmax;
  if (f.wl) c.window_s = *f.wl;
  if (f.overlap) c.overlap_ratio = *f.overlap;
  if (f.target_fs) c.target_fs = *f.target_fs;
  if (f.classifier) c.classifier = szt::parse_classifier_kind(*f.classifier);
  if (!f.classifiers.empty()) {
    c.classifiers.clear();
    for (const auto& k : f.classifiers) c.classifiers.push_back(szt::parse_classifier_kind(k));
  }
  if (f.cv) c.cv = szt::parse_cv_mode(*f.cv);
  if (f.folds) c.folds = *f.folds;
  if (f.budget) c.budget = *f.budget;
  if (f.sweep_fold) c.sweep_fold = *f.sweep_fold;
  if (f.top) c.top = *f.top;
  if (f.no_standardize) c.standardize = false;
  if (f.separability) c.genspec.separability = *f.separability;
  if (f.shared_patients) c.genspec.shared_patients = true;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seizure-type classification pipeline", "sztype"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"stats", "Per-type seizure counts, durations and patients"},
      {"synth", "Generate a synthetic EDF corpus and manifest"},
      {"featurize", "Compute (or reuse cached) window features"},
      {"cv", "Cross-validate classifiers; writes metrics.json and table.txt"},
      {"sweep", "Preprocessing grid sweep with per-point random search"},
      {"search", "Random hyperparameter search at one preprocessing point"},
      {"report", "Re-render the results table of a cv run"}};
  for (const auto& [name, help] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_flags(cmd, flags);
    if (name == "report") cmd->add_option("--run", flags.run_dir, "Directory of a previous cv run")->required();
    if (name == "synth") {
      cmd->add_option("--separability", flags.separability, "Class separability delta in [0, 1]");
      cmd->add_flag("--shared-patients", flags.shared_patients, "Let patients appear under two classes");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (flags.quiet) szt::log::set_quiet(true);
  szt::cli::RunConfig config;
  try {
    config = resolve(command, flags);
  } catch (const szt::Error& e) {
    szt::log::emit(szt::log::Level::Error, "usage_error", {{"message", e.what()}});
    return 1;
  }
  return szt::cli::run_command(command, config);
}
