// Command-line front end wiring the calibration toolkit into the full
// workflow: synth -> stratify -> calibrate -> evaluate / sweep -> compare,
// plus hyperparameter ablation.

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli_util.hpp"
#include "ucalib/conformal.hpp"
#include "ucalib/csv.hpp"
#include "ucalib/data_model.hpp"
#include "ucalib/dual.hpp"
#include "ucalib/errors.hpp"
#include "ucalib/isotonic.hpp"
#include "ucalib/metrics.hpp"
#include "ucalib/stats.hpp"
#include "ucalib/synth.hpp"
#include "ucalib/version.hpp"

namespace fs = std::filesystem;
using namespace ucalib;
using cli::json;
using cli::pct;

namespace {

// Exit statuses: 0 success, 2 usage, 3 validation/config/parse, 4 runtime.
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

template <typename T>
void merge_opt(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
  if (opt->count() == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
}

// List-valued flags accept either a comma string or a JSON array.
void merge_list(const CLI::Option* opt, const json& cfg, const char* key,
                std::string& value) {
  if (opt->count() != 0 || !cfg.contains(key)) return;
  const json& v = cfg.at(key);
  if (v.is_string()) {
    value = v.get<std::string>();
    return;
  }
  if (v.is_array()) {
    std::string joined;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) joined += ',';
      joined += format_double(v.at(i).get<double>());
    }
    value = joined;
    return;
  }
  throw ParseError(std::string("config key '") + key + "' must be a string or array");
}

json load_config_or_empty(const std::string& path) {
  if (path.empty()) return json::object();
  return cli::load_json_config(path);
}

void require_set(const char* flag, const std::string& value) {
  if (value.empty())
    throw ConfigError(std::string(flag) + " is required (flag or config file)");
}

void require_member(const char* flag, const std::string& value,
                    std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string options;
  for (const char* a : allowed) {
    if (!options.empty()) options += ", ";
    options += a;
  }
  throw ConfigError(std::string(flag) + " must be one of: " + options);
}

std::vector<bool> correctness_of(const LabelVector& predicted, const LabelVector& labels) {
  std::vector<bool> out(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) out[i] = predicted[i] == labels[i];
  return out;
}

void write_flags_csv(const fs::path& path, const StratificationFlags& flags) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(flags.flags.size());
  for (std::size_t i = 0; i < flags.flags.size(); ++i)
    rows.push_back({flags.flags[i] ? "1" : "0", std::to_string(flags.set_sizes[i]),
                    format_double(flags.quantiles[i])});
  write_table(path, {"flag", "set_size", "quantile"}, rows);
}

json stratification_json(const StratificationReport& report) {
  return json{{"putatively_correct",
               {{"size_pct", report.correct_size_pct},
                {"accuracy_pct", report.correct_accuracy_pct
                                     ? json(*report.correct_accuracy_pct)
                                     : json(nullptr)}}},
              {"putatively_incorrect",
               {{"size_pct", report.incorrect_size_pct},
                {"accuracy_pct", report.incorrect_accuracy_pct
                                     ? json(*report.incorrect_accuracy_pct)
                                     : json(nullptr)}}}};
}

json uncertainty_json(const SweepRow& row) {
  const double n = static_cast<double>(row.confusion.total());
  return json{{"tau", row.confusion.tau},
              {"uacc", pct(row.scores.uacc)},
              {"tc", pct(static_cast<double>(row.confusion.tc) / n)},
              {"tu", pct(static_cast<double>(row.confusion.tu) / n)},
              {"fc", pct(static_cast<double>(row.confusion.fc) / n)},
              {"fu", pct(static_cast<double>(row.confusion.fu) / n)},
              {"utpr", cli::pct_or_null(row.scores.utpr)},
              {"ufpr", cli::pct_or_null(row.scores.ufpr)},
              {"ug_mean", cli::pct_or_null(row.scores.ug_mean)}};
}

std::vector<std::string> uncertainty_csv_row(const SweepRow& row) {
  const double n = static_cast<double>(row.confusion.total());
  return {format_double(row.confusion.tau),
          format_double(pct(row.scores.uacc)),
          format_double(pct(static_cast<double>(row.confusion.tc) / n)),
          format_double(pct(static_cast<double>(row.confusion.tu) / n)),
          format_double(pct(static_cast<double>(row.confusion.fc) / n)),
          format_double(pct(static_cast<double>(row.confusion.fu) / n)),
          cli::pct_or_nan(row.scores.utpr),
          cli::pct_or_nan(row.scores.ufpr),
          cli::pct_or_nan(row.scores.ug_mean)};
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

void add_synth(CLI::App& app) {
  auto cmd = app.add_subcommand("synth", "Generate a synthetic benchmark bundle");
  struct Opts {
    std::string out;
    std::string config_path;
    synth::SynthConfig cfg;
    std::string fractions = "0.55,0.15,0.15,0.15";
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config_path, "JSON config file (flags override)");
  auto* out = cmd->add_option("--out", o->out, "Bundle output directory");
  auto* classes = cmd->add_option("--classes", o->cfg.classes, "Number of classes");
  auto* per_class = cmd->add_option("--per-class", o->cfg.per_class, "Samples per class");
  auto* dim = cmd->add_option("--dim", o->cfg.dim, "Feature dimensionality");
  auto* separation = cmd->add_option("--separation", o->cfg.separation, "Centroid sphere radius");
  auto* spread = cmd->add_option("--spread", o->cfg.spread, "Within-class stddev");
  auto* passes = cmd->add_option("--passes", o->cfg.passes, "Stochastic passes T");
  auto* gamma = cmd->add_option("--gamma", o->cfg.sharpness, "Logit sharpness");
  auto* sigma = cmd->add_option("--sigma", o->cfg.pass_noise, "Per-pass logit noise");
  auto* seed = cmd->add_option("--seed", o->cfg.seed, "Seed for all randomness");
  auto* fractions = cmd->add_option("--fractions", o->fractions,
                                    "train,conformal,calibration,test fractions");

  cmd->callback([o, out, classes, per_class, dim, separation, spread, passes, gamma,
                 sigma, seed, fractions] {
    const json cfg = load_config_or_empty(o->config_path);
    merge_opt(out, cfg, "out", o->out);
    merge_opt(classes, cfg, "classes", o->cfg.classes);
    merge_opt(per_class, cfg, "per_class", o->cfg.per_class);
    merge_opt(dim, cfg, "dim", o->cfg.dim);
    merge_opt(separation, cfg, "separation", o->cfg.separation);
    merge_opt(spread, cfg, "spread", o->cfg.spread);
    merge_opt(passes, cfg, "passes", o->cfg.passes);
    merge_opt(gamma, cfg, "gamma", o->cfg.sharpness);
    merge_opt(sigma, cfg, "sigma", o->cfg.pass_noise);
    merge_opt(seed, cfg, "seed", o->cfg.seed);
    merge_list(fractions, cfg, "fractions", o->fractions);

    require_set("--out", o->out);
    const auto f = cli::parse_double_list(o->fractions, "--fractions");
    if (f.size() != 4) throw ConfigError("--fractions: need exactly 4 values");
    SplitSpec split{f[0], f[1], f[2], f[3], o->cfg.seed};

    cli::RunRecorder rec("synth", o->out);
    auto summary = synth::make_benchmark(o->cfg, split, o->out);
    for (const auto& [rel, digest] : summary.digests)
      rec.add_artifact(fs::path(o->out) / rel);
    rec.add_artifact(fs::path(o->out) / "manifest.json");

    json echo{{"out", o->out},
              {"classes", o->cfg.classes},
              {"per_class", o->cfg.per_class},
              {"dim", o->cfg.dim},
              {"separation", o->cfg.separation},
              {"spread", o->cfg.spread},
              {"passes", o->cfg.passes},
              {"gamma", o->cfg.sharpness},
              {"sigma", o->cfg.pass_noise},
              {"seed", o->cfg.seed},
              {"fractions", f}};
    rec.finish(echo);
    std::printf("bundle written to %s (train=%zu conformal=%zu calibration=%zu test=%zu)\n",
                o->out.c_str(), summary.train_size, summary.conformal_size,
                summary.calibration_size, summary.test_size);
  });
}

// ---------------------------------------------------------------------------
// stratify
// ---------------------------------------------------------------------------

void add_stratify(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "stratify", "Flag a split putatively correct/incorrect via conformal prediction");
  struct Opts {
    std::string bundle, out, split = "test", config_path;
    std::size_t k = 20;
    double alpha = 0.01;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config_path, "JSON config file (flags override)");
  auto* in = cmd->add_option("--in,--bundle", o->bundle, "Bundle directory");
  auto* out = cmd->add_option("--out", o->out, "Output directory");
  auto* split = cmd->add_option("--split", o->split, "Which split to stratify")
                    ->check(CLI::IsMember({"calibration", "test"}));
  auto* k = cmd->add_option("--k", o->k, "Neighborhood size");
  auto* alpha = cmd->add_option("--alpha", o->alpha, "Miscoverage rate");

  cmd->callback([o, in, out, split, k, alpha] {
    const json cfg = load_config_or_empty(o->config_path);
    merge_opt(in, cfg, "in", o->bundle);
    merge_opt(out, cfg, "out", o->out);
    merge_opt(split, cfg, "split", o->split);
    merge_opt(k, cfg, "k", o->k);
    merge_opt(alpha, cfg, "alpha", o->alpha);

    require_set("--in", o->bundle);
    require_set("--out", o->out);
    require_member("--split", o->split, {"calibration", "test"});

    cli::RunRecorder rec("stratify", o->out);
    auto conf = cli::load_split(fs::path(o->bundle) / "conformal");
    auto target = cli::load_split(fs::path(o->bundle) / o->split);
    auto index = NeighborIndex::build(std::move(conf.features), std::move(conf.labels),
                                      conf.mean);
    ConformalConfig config{o->k, o->alpha};
    auto predicted = argmax_labels(target.mean);
    auto flags = stratify(index, target.features, target.mean, predicted, config);

    const fs::path flags_path = fs::path(o->out) / "flags.csv";
    write_flags_csv(flags_path, flags);
    rec.add_artifact(flags_path);

    auto report =
        stratification_report(flags.flags, correctness_of(predicted, target.labels));
    const std::size_t m = static_cast<std::size_t>(
        std::ceil((1.0 - o->alpha) * static_cast<double>(o->k)));
    json rj = stratification_json(report);
    rj["split"] = o->split;
    rj["k"] = o->k;
    rj["alpha"] = o->alpha;
    rj["samples"] = flags.flags.size();
    rj["quantile_rule"] = "m-th smallest of the k neighbor scores, m = ceil((1-alpha)*k)";
    rj["quantile_order_statistic"] = std::min<std::size_t>(std::max<std::size_t>(m, 1), o->k);
    rj["quantile_is_neighborhood_max"] = m >= o->k;
    const fs::path report_path = fs::path(o->out) / "report.json";
    cli::write_text(report_path, rj.dump(2) + "\n");
    rec.add_artifact(report_path);

    rec.finish(json{{"in", o->bundle},
                    {"out", o->out},
                    {"split", o->split},
                    {"k", o->k},
                    {"alpha", o->alpha}});
    std::printf("stratified %zu samples: %.2f%% putatively correct\n", flags.flags.size(),
                report.correct_size_pct);
  });
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

void add_calibrate(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "calibrate", "Fit a calibrator on the calibration split and transform the test split");
  struct Opts {
    std::string bundle, out, mode, config_path;
    double beta = 0.9;
    std::size_t k = 20;
    double alpha = 0.01;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config_path, "JSON config file (flags override)");
  auto* in = cmd->add_option("--in,--bundle", o->bundle, "Bundle directory");
  auto* out = cmd->add_option("--out", o->out, "Output directory");
  auto* mode = cmd->add_option("--mode", o->mode, "none | isotonic | dual")
                   ->check(CLI::IsMember({"none", "isotonic", "dual"}));
  auto* beta = cmd->add_option("--beta", o->beta, "Underconfidence factor");
  auto* k = cmd->add_option("--k", o->k, "Neighborhood size");
  auto* alpha = cmd->add_option("--alpha", o->alpha, "Miscoverage rate");

  cmd->callback([o, in, out, mode, beta, k, alpha] {
    const json cfg = load_config_or_empty(o->config_path);
    merge_opt(in, cfg, "in", o->bundle);
    merge_opt(out, cfg, "out", o->out);
    merge_opt(mode, cfg, "mode", o->mode);
    merge_opt(beta, cfg, "beta", o->beta);
    merge_opt(k, cfg, "k", o->k);
    merge_opt(alpha, cfg, "alpha", o->alpha);

    require_set("--in", o->bundle);
    require_set("--out", o->out);
    require_set("--mode", o->mode);
    require_member("--mode", o->mode, {"none", "isotonic", "dual"});

    cli::RunRecorder rec("calibrate", o->out);
    auto conf = cli::load_split(fs::path(o->bundle) / "conformal");
    auto cal = cli::load_split(fs::path(o->bundle) / "calibration");
    auto test = cli::load_split(fs::path(o->bundle) / "test");
    auto index =
        NeighborIndex::build(std::move(conf.features), std::move(conf.labels), conf.mean);
    ConformalConfig config{o->k, o->alpha};

    auto predicted = argmax_labels(test.mean);
    ProbMatrix calibrated = test.mean;
    StratificationFlags test_flags;
    std::string calibrator_json;

    if (o->mode == "none") {
      test_flags = stratify(index, test.features, test.mean, predicted, config);
      calibrator_json = json{{"format", "ucalib-calibrator"},
                             {"version", kCalibratorFormatVersion},
                             {"mode", "none"}}
                            .dump(2);
    } else if (o->mode == "isotonic") {
      test_flags = stratify(index, test.features, test.mean, predicted, config);
      auto iso = fit_standard(cal.mean, cal.labels);
      calibrated = iso.apply(test.mean);
      calibrator_json = iso.to_json_string();
    } else {
      auto cal_flags =
          stratify(index, cal.features, cal.mean, argmax_labels(cal.mean), config);
      auto dual = fit_dual(cal.mean, cal.labels, cal_flags, o->beta, config);
      for (const auto& w : dual.warnings()) rec.add_warning(w);
      auto output = dual.infer(index, test.features, test.stack);
      calibrated = std::move(output.calibrated);
      test_flags = std::move(output.flags);
      predicted = std::move(output.predicted_labels);
      calibrator_json = dual.to_json_string();
    }

    const fs::path probs_path = fs::path(o->out) / "probs.csv";
    write_prob_matrix(probs_path, calibrated);
    rec.add_artifact(probs_path);

    const fs::path entropy_path = fs::path(o->out) / "entropy.csv";
    write_double_column(entropy_path, "entropy", normalized_entropies(calibrated));
    rec.add_artifact(entropy_path);

    const fs::path flags_path = fs::path(o->out) / "flags.csv";
    write_flags_csv(flags_path, test_flags);
    rec.add_artifact(flags_path);

    const fs::path pred_path = fs::path(o->out) / "predicted.csv";
    write_labels(pred_path, predicted);
    rec.add_artifact(pred_path);

    const fs::path cal_path = fs::path(o->out) / "calibrator.json";
    cli::write_text(cal_path, calibrator_json + "\n");
    rec.add_artifact(cal_path);

    rec.finish(json{{"in", o->bundle},
                    {"out", o->out},
                    {"mode", o->mode},
                    {"beta", o->beta},
                    {"k", o->k},
                    {"alpha", o->alpha}});
    std::printf("calibrated %zu test samples (mode=%s)\n", calibrated.samples(),
                o->mode.c_str());
  });
}

// ---------------------------------------------------------------------------
// evaluate / sweep (shared loading)
// ---------------------------------------------------------------------------

struct EvalInputs {
  ProbMatrix probs;
  LabelVector labels;
  LabelVector predicted;
  std::vector<bool> correctness;
  std::vector<double> entropies;
  bool pred_from_file = false;
};

EvalInputs load_eval_inputs(const std::string& probs_path, const std::string& labels_path,
                            const std::string& pred_path) {
  auto probs = read_prob_matrix(probs_path);
  auto labels = read_labels(labels_path, probs.classes());
  if (labels.size() != probs.samples())
    throw ValidationError("labels row count does not match probs row count");
  LabelVector predicted = argmax_labels(probs);
  bool from_file = false;
  if (!pred_path.empty()) {
    predicted = read_labels(pred_path, probs.classes());
    if (predicted.size() != probs.samples())
      throw ValidationError("predicted-label row count does not match probs row count");
    from_file = true;
  }
  auto correctness = correctness_of(predicted, labels);
  auto entropies = normalized_entropies(probs);
  return EvalInputs{std::move(probs),       std::move(labels),    std::move(predicted),
                    std::move(correctness), std::move(entropies), from_file};
}

void add_evaluate(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "evaluate", "Calibration, classification and uncertainty metrics for one method");
  struct Opts {
    std::string probs, labels, pred, out, method, config_path;
    std::size_t bins = 15;
    std::string taus = "0.2,0.3,0.4,0.5,0.6";
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config_path, "JSON config file (flags override)");
  auto* probs = cmd->add_option("--probs", o->probs, "probs.csv to evaluate");
  auto* labels =
      cmd->add_option("--labels", o->labels, "labels.csv with true labels");
  auto* pred = cmd->add_option("--pred", o->pred,
                               "predicted.csv with fixed pre-calibration labels");
  auto* out = cmd->add_option("--out", o->out, "Output directory");
  auto* bins = cmd->add_option("--bins", o->bins, "Reliability bin count");
  auto* taus = cmd->add_option("--taus", o->taus, "Entropy thresholds");
  auto* method = cmd->add_option("--method", o->method, "Method tag echoed in the report");

  cmd->callback([o, probs, labels, pred, out, bins, taus, method] {
    const json cfg = load_config_or_empty(o->config_path);
    merge_opt(probs, cfg, "probs", o->probs);
    merge_opt(labels, cfg, "labels", o->labels);
    merge_opt(pred, cfg, "pred", o->pred);
    merge_opt(out, cfg, "out", o->out);
    merge_opt(bins, cfg, "bins", o->bins);
    merge_list(taus, cfg, "taus", o->taus);
    merge_opt(method, cfg, "method", o->method);

    require_set("--probs", o->probs);
    require_set("--labels", o->labels);
    require_set("--out", o->out);

    cli::RunRecorder rec("evaluate", o->out);
    auto in = load_eval_inputs(o->probs, o->labels, o->pred);
    const auto tau_list = cli::parse_double_list(o->taus, "--taus");

    auto rb = reliability_bins(max_prob_confidences(in.probs), in.correctness, o->bins);
    auto scores = classification_scores(in.predicted, in.labels);
    auto sweep_rows = threshold_sweep(in.correctness, in.entropies, tau_list);

    json report{{"format", "ucalib-evaluate"},
                {"version", std::string(kVersion)},
                {"method", o->method.empty() ? json(nullptr) : json(o->method)},
                {"samples", in.probs.samples()},
                {"classes", in.probs.classes()},
                {"bins", o->bins},
                {"units", "percent"},
                {"correctness_source", in.pred_from_file ? "pred-file" : "argmax"},
                {"accuracy", pct(scores.accuracy)},
                {"macro_f1", pct(scores.macro_f1)},
                {"ece", pct(ece(rb))},
                {"mce", pct(mce(rb))},
                {"brier", pct(brier(in.probs, in.labels))}};
    json blocks = json::array();
    for (const auto& row : sweep_rows) blocks.push_back(uncertainty_json(row));
    report["uncertainty"] = std::move(blocks);
    const fs::path report_path = fs::path(o->out) / "report.json";
    cli::write_text(report_path, report.dump(2) + "\n");
    rec.add_artifact(report_path);

    std::vector<std::vector<std::string>> rows;
    for (const auto& b : rb.bins)
      rows.push_back({format_double(b.lo), format_double(b.hi),
                      format_double(b.confidence), format_double(b.accuracy),
                      std::to_string(b.count)});
    const fs::path rel_path = fs::path(o->out) / "reliability.csv";
    write_table(rel_path, {"lo", "hi", "conf", "acc", "count"}, rows);
    rec.add_artifact(rel_path);

    rec.finish(json{{"probs", o->probs},
                    {"labels", o->labels},
                    {"pred", o->pred},
                    {"out", o->out},
                    {"bins", o->bins},
                    {"taus", tau_list},
                    {"method", o->method}});
    std::printf("evaluate: accuracy=%.3f%% ece=%.3f%% brier=%.3f%%\n", pct(scores.accuracy),
                pct(ece(rb)), pct(brier(in.probs, in.labels)));
  });
}

void add_sweep(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "sweep", "Uncertainty-aware confusion table over entropy thresholds");
  struct Opts {
    std::string probs, labels, pred, out, method, config_path;
    std::string taus = "0.2,0.3,0.4,0.5,0.6";
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config_path, "JSON config file (flags override)");
  auto* probs = cmd->add_option("--probs", o->probs, "probs.csv to evaluate");
  auto* labels =
      cmd->add_option("--labels", o->labels, "labels.csv with true labels");
  auto* pred = cmd->add_option("--pred", o->pred,
                               "predicted.csv with fixed pre-calibration labels");
  auto* out = cmd->add_option("--out", o->out, "Output directory");
  auto* taus = cmd->add_option("--taus", o->taus, "Entropy thresholds");
  auto* method = cmd->add_option("--method", o->method, "Method tag (echoed in manifest)");

  cmd->callback([o, probs, labels, pred, out, taus, method] {
    const json cfg = load_config_or_empty(o->config_path);
    merge_opt(probs, cfg, "probs", o->probs);
    merge_opt(labels, cfg, "labels", o->labels);
    merge_opt(pred, cfg, "pred", o->pred);
    merge_opt(out, cfg, "out", o->out);
    merge_list(taus, cfg, "taus", o->taus);
    merge_opt(method, cfg, "method", o->method);

    require_set("--probs", o->probs);
    require_set("--labels", o->labels);
    require_set("--out", o->out);

    cli::RunRecorder rec("sweep", o->out);
    auto in = load_eval_inputs(o->probs, o->labels, o->pred);
    const auto tau_list = cli::parse_double_list(o->taus, "--taus");
    auto sweep_rows = threshold_sweep(in.correctness, in.entropies, tau_list);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(sweep_rows.size());
    for (const auto& row : sweep_rows) rows.push_back(uncertainty_csv_row(row));
    const fs::path sweep_path = fs::path(o->out) / "sweep.csv";
    write_table(sweep_path,
                {"tau", "uacc", "tc", "tu", "fc", "fu", "utpr", "ufpr", "ug_mean"}, rows);
    rec.add_artifact(sweep_path);

    rec.finish(json{{"probs", o->probs},
                    {"labels", o->labels},
                    {"pred", o->pred},
                    {"out", o->out},
                    {"taus", tau_list},
                    {"method", o->method}});
    std::printf("sweep: %zu thresholds over %zu samples\n", tau_list.size(),
                in.probs.samples());
  });
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

void add_compare(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "compare", "Friedman + one-sided Wilcoxon/Holm/Cliff's delta over per-run metrics");
  struct Opts {
    std::string in, out, target, alternative = "less", config_path;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config_path, "JSON config file (flags override)");
  auto* in =
      cmd->add_option("--in", o->in, "runs.csv: one column per method, one row per run");
  auto* out = cmd->add_option("--out", o->out, "Output directory");
  auto* target =
      cmd->add_option("--target", o->target, "Method column compared against the rest");
  auto* alternative = cmd->add_option("--alternative", o->alternative,
                                      "less: smaller target is better; greater: larger")
                          ->check(CLI::IsMember({"less", "greater"}));

  cmd->callback([o, in, out, target, alternative] {
    const json cfg = load_config_or_empty(o->config_path);
    merge_opt(in, cfg, "in", o->in);
    merge_opt(out, cfg, "out", o->out);
    merge_opt(target, cfg, "target", o->target);
    merge_opt(alternative, cfg, "alternative", o->alternative);

    require_set("--in", o->in);
    require_set("--out", o->out);
    require_set("--target", o->target);
    require_member("--alternative", o->alternative, {"less", "greater"});

    cli::RunRecorder rec("compare", o->out);
    auto table = read_table(o->in);
    Matrix values(table.rows.size(), table.header.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r)
      for (std::size_t c = 0; c < table.header.size(); ++c)
        values(r, c) = parse_double(table.rows[r][c],
                                    o->in + ":" + std::to_string(r + 2) + ", column " +
                                        std::to_string(c + 1));
    auto rm = stats::RunMatrix::checked(table.header, std::move(values));

    std::size_t target_col = rm.methods.size();
    for (std::size_t c = 0; c < rm.methods.size(); ++c)
      if (rm.methods[c] == o->target) target_col = c;
    if (target_col == rm.methods.size())
      throw ConfigError("--target '" + o->target + "' is not a column of " + o->in);

    auto fried = stats::friedman(rm);
    json ranks;
    for (std::size_t c = 0; c < rm.methods.size(); ++c)
      ranks[rm.methods[c]] = fried.average_ranks[c];

    std::vector<double> target_vals(rm.runs());
    for (std::size_t r = 0; r < rm.runs(); ++r) target_vals[r] = rm.values(r, target_col);

    struct Pair {
      std::string baseline;
      stats::WilcoxonResult wilcoxon;
      double cliffs = 0.0;
      double median_diff = 0.0;
    };
    std::vector<Pair> pairs;
    for (std::size_t c = 0; c < rm.methods.size(); ++c) {
      if (c == target_col) continue;
      std::vector<double> base_vals(rm.runs());
      for (std::size_t r = 0; r < rm.runs(); ++r) base_vals[r] = rm.values(r, c);
      auto w = o->alternative == "less"
                   ? stats::wilcoxon_one_sided(target_vals, base_vals)
                   : stats::wilcoxon_one_sided(base_vals, target_vals);
      std::vector<double> diffs(rm.runs());
      for (std::size_t r = 0; r < rm.runs(); ++r) diffs[r] = target_vals[r] - base_vals[r];
      pairs.push_back(Pair{rm.methods[c], w, stats::cliffs_delta(target_vals, base_vals),
                           stats::median(diffs)});
    }

    // Holm over the defined raw p-values; degenerate pairs stay null.
    std::vector<double> defined_p;
    for (const auto& p : pairs)
      if (p.wilcoxon.p_value) defined_p.push_back(*p.wilcoxon.p_value);
    const auto adjusted =
        defined_p.empty() ? std::vector<double>{} : stats::holm(defined_p);
    std::size_t next = 0;
    json pairwise = json::array();
    for (const auto& p : pairs) {
      json row{{"baseline", p.baseline},
               {"w", p.wilcoxon.statistic ? json(*p.wilcoxon.statistic) : json(nullptr)},
               {"raw_p", p.wilcoxon.p_value ? json(*p.wilcoxon.p_value) : json(nullptr)},
               {"holm_p", nullptr},
               {"cliffs_delta", p.cliffs},
               {"median_diff", p.median_diff},
               {"n_used", p.wilcoxon.n_used},
               {"exact", p.wilcoxon.exact}};
      if (p.wilcoxon.p_value) row["holm_p"] = adjusted[next++];
      pairwise.push_back(std::move(row));
    }

    json report{{"format", "ucalib-compare"},
                {"version", std::string(kVersion)},
                {"metric_file", o->in},
                {"target", o->target},
                {"alternative", o->alternative},
                {"runs", rm.runs()},
                {"methods", rm.methods},
                {"friedman",
                 {{"chi2", fried.chi2},
                  {"p_value", fried.p_value},
                  {"average_ranks", ranks}}},
                {"pairwise", std::move(pairwise)},
                {"conventions",
                 {{"ranks", "rank 1 = smallest metric value"},
                  {"wilcoxon",
                   "zero differences dropped; tied magnitudes share average ranks"}}}};
    const fs::path report_path = fs::path(o->out) / "report.json";
    cli::write_text(report_path, report.dump(2) + "\n");
    rec.add_artifact(report_path);

    rec.finish(json{{"in", o->in},
                    {"out", o->out},
                    {"target", o->target},
                    {"alternative", o->alternative}});
    std::printf("compare: friedman chi2=%.4f p=%.3g over %zu methods\n", fried.chi2,
                fried.p_value, rm.methods.size());
  });
}

// ---------------------------------------------------------------------------
// ablate
// ---------------------------------------------------------------------------

void add_ablate(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "ablate", "Grid sweep over k or beta, one CSV row of pipeline metrics per point");
  struct Opts {
    std::string bundle, out, param, grid, config_path;
    double beta = 0.9;
    std::size_t k = 20;
    double alpha = 0.01;
    double tau = 0.5;
    std::size_t bins = 15;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config_path, "JSON config file (flags override)");
  auto* in = cmd->add_option("--in,--bundle", o->bundle, "Bundle directory");
  auto* out = cmd->add_option("--out", o->out, "Output directory");
  auto* param = cmd->add_option("--param", o->param, "k | beta")
                    ->check(CLI::IsMember({"k", "beta"}));
  auto* grid =
      cmd->add_option("--grid", o->grid, "Comma-separated grid values");
  auto* beta = cmd->add_option("--beta", o->beta, "Fixed beta when sweeping k");
  auto* k = cmd->add_option("--k", o->k, "Fixed k when sweeping beta");
  auto* alpha = cmd->add_option("--alpha", o->alpha, "Miscoverage rate");
  auto* tau = cmd->add_option("--tau", o->tau, "Entropy threshold for FC/TC");
  auto* bins = cmd->add_option("--bins", o->bins, "Reliability bin count");

  cmd->callback([o, in, out, param, grid, beta, k, alpha, tau, bins] {
    const json cfg = load_config_or_empty(o->config_path);
    merge_opt(in, cfg, "in", o->bundle);
    merge_opt(out, cfg, "out", o->out);
    merge_opt(param, cfg, "param", o->param);
    merge_list(grid, cfg, "grid", o->grid);
    merge_opt(beta, cfg, "beta", o->beta);
    merge_opt(k, cfg, "k", o->k);
    merge_opt(alpha, cfg, "alpha", o->alpha);
    merge_opt(tau, cfg, "tau", o->tau);
    merge_opt(bins, cfg, "bins", o->bins);

    require_set("--in", o->bundle);
    require_set("--out", o->out);
    require_set("--param", o->param);
    require_member("--param", o->param, {"k", "beta"});
    require_set("--grid", o->grid);

    cli::RunRecorder rec("ablate", o->out);
    auto conf = cli::load_split(fs::path(o->bundle) / "conformal");
    auto cal = cli::load_split(fs::path(o->bundle) / "calibration");
    auto test = cli::load_split(fs::path(o->bundle) / "test");
    auto index =
        NeighborIndex::build(std::move(conf.features), std::move(conf.labels), conf.mean);
    auto cal_predicted = argmax_labels(cal.mean);
    const auto grid_values = cli::parse_double_list(o->grid, "--grid");

    std::vector<std::vector<std::string>> rows;
    for (double value : grid_values) {
      ConformalConfig config{o->k, o->alpha};
      double run_beta = o->beta;
      if (o->param == "k") {
        if (value < 1.0 || value != std::floor(value))
          throw ConfigError("--grid: k values must be positive integers");
        config.k = static_cast<std::size_t>(value);
      } else {
        run_beta = value;
      }
      auto cal_flags = stratify(index, cal.features, cal.mean, cal_predicted, config);
      auto dual = fit_dual(cal.mean, cal.labels, cal_flags, run_beta, config);
      for (const auto& w : dual.warnings())
        rec.add_warning(o->param + "=" + format_double(value) + ": " + w);
      auto output = dual.infer(index, test.features, test.stack);

      auto correctness = correctness_of(output.predicted_labels, test.labels);
      auto rb =
          reliability_bins(max_prob_confidences(output.calibrated), correctness, o->bins);
      auto confusion = uncertainty_confusion(correctness, output.entropies, o->tau);
      auto report = stratification_report(output.flags.flags, correctness);
      const double n = static_cast<double>(confusion.total());
      rows.push_back(
          {o->param, format_double(value), format_double(pct(ece(rb))),
           format_double(pct(static_cast<double>(confusion.fc) / n)),
           format_double(pct(static_cast<double>(confusion.tc) / n)),
           format_double(report.correct_size_pct),
           report.correct_accuracy_pct ? format_double(*report.correct_accuracy_pct)
                                       : "nan",
           format_double(report.incorrect_size_pct),
           report.incorrect_accuracy_pct ? format_double(*report.incorrect_accuracy_pct)
                                         : "nan"});
    }

    const fs::path ablate_path = fs::path(o->out) / "ablate.csv";
    write_table(ablate_path,
                {"param", "value", "ece", "fc", "tc", "correct_size", "correct_acc",
                 "incorrect_size", "incorrect_acc"},
                rows);
    rec.add_artifact(ablate_path);

    rec.finish(json{{"in", o->bundle},
                    {"out", o->out},
                    {"param", o->param},
                    {"grid", grid_values},
                    {"beta", o->beta},
                    {"k", o->k},
                    {"alpha", o->alpha},
                    {"tau", o->tau},
                    {"bins", o->bins}});
    std::printf("ablate: %zu grid points over %s\n", grid_values.size(), o->param.c_str());
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual isotonic calibration with conformal stratification"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  add_synth(app);
  add_stratify(app);
  add_calibrate(app);
  add_evaluate(app);
  add_sweep(app);
  add_compare(app);
  add_ablate(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ucalib::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
