#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config_file.hpp"
#include "wepadim/analysis.hpp"
#include "wepadim/manifest.hpp"
#include "wepadim/model_io.hpp"
#include "wepadim/pipeline.hpp"
#include "wepadim/report.hpp"
#include "wepadim/results_csv.hpp"
#include "wepadim/sweep.hpp"
#include "wepadim/synth.hpp"

namespace wepadim::cli {
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kAllowedKeys = {
    "run.threads",         "run.seed",          "run.backbone",
    "synth.image_size",    "synth.n_train",     "synth.n_test_normal",
    "synth.n_test_anomalous", "synth.texture",  "synth.anomaly",
    "synth.magnitude",     "synth.class",       "synth.stages",
    "model.method",        "model.wavelet",     "model.level",
    "model.subbands",      "model.sigma",       "model.cov_reg",
    "model.random_dims",   "grid.wavelets",     "grid.levels",
    "grid.subbands",       "grid.sigmas",       "grid.cov_regs",
    "sweep.record_timing",
};

// Raw flag values; empty optionals mean "not given on the command line".
struct Flags {
  std::string config;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string out;

  // synth
  std::optional<std::string> image_size;
  std::optional<std::size_t> n_train;
  std::optional<std::size_t> n_test_normal;
  std::optional<std::size_t> n_test_anomalous;
  std::optional<std::string> texture;
  std::optional<std::string> anomaly;
  std::optional<double> magnitude;
  std::optional<std::string> class_name;
  std::optional<std::string> stages;

  // model
  std::optional<std::string> method;
  std::optional<std::string> wavelet;
  std::optional<int> level;
  std::optional<std::string> subbands;
  std::optional<double> sigma;
  std::optional<double> cov_reg;
  std::optional<std::size_t> random_dims;

  // data
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::vector<std::string> corpora;
  std::string model;
  std::string results;
  std::optional<std::string> backbone;
  bool no_timing = false;
  bool overwrite = false;
};

struct Context {
  Flags flags;
  ConfigFile config;
  int threads = 1;
  std::ostream* out = nullptr;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <typename T>
T pick(const std::optional<T>& flag, const std::optional<T>& file, T fallback) {
  if (flag) return *flag;
  if (file) return *file;
  return fallback;
}

int resolve_threads(const Flags& f, const ConfigFile& cfg) {
  long long n = 1;
  if (f.threads) {
    n = *f.threads;
  } else if (const char* env = std::getenv("WEPADIM_THREADS"); env != nullptr && *env != '\0') {
    n = parse_integer(env, "WEPADIM_THREADS");
  } else if (const auto c = cfg.integer("run.threads")) {
    n = *c;
  }
  if (n < 1 || n > 1024) fail(ErrorKind::config, "thread count must be in [1, 1024]");
  return static_cast<int>(n);
}

std::uint64_t resolve_seed(const Context& ctx, std::uint64_t fallback) {
  if (ctx.flags.seed) return *ctx.flags.seed;
  if (const auto s = ctx.config.integer("run.seed")) {
    if (*s < 0) fail(ErrorKind::config, "seed must be non-negative");
    return static_cast<std::uint64_t>(*s);
  }
  return fallback;
}

std::string resolve_backbone(const Context& ctx) {
  return pick(ctx.flags.backbone, ctx.config.text("run.backbone"), std::string("synthetic"));
}

ImageSize parse_image_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) {
    const auto n = parse_integer(s, "image_size");
    if (n <= 0) fail(ErrorKind::config, "image_size must be positive");
    return {static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
  const auto h = parse_integer(s.substr(0, x), "image_size");
  const auto w = parse_integer(s.substr(x + 1), "image_size");
  if (h <= 0 || w <= 0) fail(ErrorKind::config, "image_size must be positive");
  return {static_cast<std::size_t>(h), static_cast<std::size_t>(w)};
}

// "64x4,128x8,256x16" or a list of "CxF" items.
std::vector<StageSpec> parse_stages(const std::vector<std::string>& items) {
  std::vector<StageSpec> stages;
  for (const auto& item : items) {
    std::stringstream ss(item);
    for (std::string part; std::getline(ss, part, ',');) {
      const auto x = part.find('x');
      if (x == std::string::npos) fail(ErrorKind::config, "stage '" + part + "' must look like 64x4");
      const auto c = parse_integer(part.substr(0, x), "stage channels");
      const auto f = parse_integer(part.substr(x + 1), "stage factor");
      if (c <= 0 || f <= 0) fail(ErrorKind::config, "stage values must be positive");
      stages.push_back({static_cast<std::size_t>(c), static_cast<std::size_t>(f)});
    }
  }
  return stages;
}

fs::path manifest_path(const std::string& p) {
  const fs::path path(p);
  if (fs::is_directory(path)) return path / "manifest.json";
  return path;
}

std::size_t count_size(const std::optional<long long>& v, const char* what) {
  if (*v < 0) fail(ErrorKind::config, std::string(what) + " must be non-negative");
  return static_cast<std::size_t>(*v);
}

SynthSpec synth_spec(const Context& ctx) {
  const Flags& f = ctx.flags;
  const ConfigFile& c = ctx.config;
  SynthSpec s;
  s.seed = resolve_seed(ctx, s.seed);
  if (f.image_size) {
    s.image_size = parse_image_size(*f.image_size);
  } else if (const auto t = c.text("synth.image_size")) {
    s.image_size = parse_image_size(*t);
  }
  if (f.n_train) s.n_train = *f.n_train;
  else if (const auto v = c.integer("synth.n_train")) s.n_train = count_size(v, "n_train");
  if (f.n_test_normal) s.n_test_normal = *f.n_test_normal;
  else if (const auto v = c.integer("synth.n_test_normal")) s.n_test_normal = count_size(v, "n_test_normal");
  if (f.n_test_anomalous) s.n_test_anomalous = *f.n_test_anomalous;
  else if (const auto v = c.integer("synth.n_test_anomalous")) s.n_test_anomalous = count_size(v, "n_test_anomalous");
  s.texture = parse_texture(pick(f.texture, c.text("synth.texture"), to_string(s.texture)));
  s.anomaly_kind = parse_anomaly_kind(pick(f.anomaly, c.text("synth.anomaly"), to_string(s.anomaly_kind)));
  if (f.magnitude) s.anomaly_magnitude = *f.magnitude;
  else if (const auto m = c.real("synth.magnitude")) s.anomaly_magnitude = *m;
  s.class_name = pick(f.class_name, c.text("synth.class"), s.class_name);
  s.validate();
  return s;
}

std::vector<StageSpec> synth_stages(const Context& ctx) {
  if (ctx.flags.stages) return parse_stages({*ctx.flags.stages});
  if (const auto l = ctx.config.list("synth.stages")) return parse_stages(*l);
  return PyramidExtractor::default_stages();
}

WaveletConfig wavelet_config(const Context& ctx) {
  const Flags& f = ctx.flags;
  const ConfigFile& c = ctx.config;
  WaveletConfig w;
  w.wavelet = pick(f.wavelet, c.text("model.wavelet"), w.wavelet);
  if (f.level) w.level = *f.level;
  else if (const auto l = c.integer("model.level")) w.level = static_cast<int>(*l);
  if (f.subbands) w.subbands = SubbandSet::parse(*f.subbands);
  else if (const auto s = c.text("model.subbands")) w.subbands = SubbandSet::parse(*s);
  w.sigma = pick(f.sigma, c.real("model.sigma"), w.sigma);
  w.cov_reg = pick(f.cov_reg, c.real("model.cov_reg"), w.cov_reg);
  w.validate();
  return w;
}

SweepGrid sweep_grid(const ConfigFile& c) {
  SweepGrid g;
  if (const auto l = c.list("grid.wavelets")) g.wavelets = *l;
  if (const auto l = c.list("grid.levels")) {
    g.levels.clear();
    for (const auto& s : *l) g.levels.push_back(static_cast<int>(parse_integer(s, "grid.levels")));
  }
  if (const auto l = c.list("grid.subbands")) {
    g.subbands.clear();
    for (const auto& s : *l) {
      if (s == "all") {
        const auto all = SubbandSet::all_nonempty();
        g.subbands.insert(g.subbands.end(), all.begin(), all.end());
      } else {
        g.subbands.push_back(SubbandSet::parse(s));
      }
    }
  }
  if (const auto l = c.list("grid.sigmas")) {
    g.sigmas.clear();
    for (const auto& s : *l) g.sigmas.push_back(parse_real(s, "grid.sigmas"));
  }
  if (const auto l = c.list("grid.cov_regs")) {
    g.cov_regs.clear();
    for (const auto& s : *l) g.cov_regs.push_back(parse_real(s, "grid.cov_regs"));
  }
  g.validate();
  return g;
}

// ---------------------------------------------------------------- commands

void cmd_synth(Context& ctx) {
  if (ctx.flags.out.empty()) fail(ErrorKind::config, "synth needs --out DIR");
  const SynthSpec spec = synth_spec(ctx);
  const PyramidExtractor extractor(spec.seed, synth_stages(ctx));
  const auto t0 = std::chrono::steady_clock::now();
  const CorpusManifests m = generate_corpus(spec, extractor, ctx.flags.out, ctx.threads);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  *ctx.out << "synth: class=" << spec.class_name << " train=" << m.train.entries.size()
           << " test=" << m.test.entries.size() << " out=" << ctx.flags.out << " elapsed=" << fmt("%.3f", dt)
           << "s\n";
}

void cmd_fit(Context& ctx) {
  if (ctx.flags.train.size() != 1) fail(ErrorKind::config, "fit needs exactly one --train MANIFEST");
  if (ctx.flags.out.empty()) fail(ErrorKind::config, "fit needs --out DIR");
  ModelConfig mc;
  mc.wavelet = wavelet_config(ctx);
  const std::string method = pick(ctx.flags.method, ctx.config.text("model.method"), std::string("wavelet"));
  std::size_t random_dims = 0;
  if (method == "random") {
    mc.method = EmbeddingMethod::random;
    if (ctx.flags.random_dims) random_dims = *ctx.flags.random_dims;
    else if (const auto d = ctx.config.integer("model.random_dims")) random_dims = count_size(d, "random_dims");
    if (random_dims == 0) fail(ErrorKind::config, "random method needs --random-dims > 0");
  } else if (method != "wavelet") {
    fail(ErrorKind::config, "unknown method '" + method + "'");
  }

  const ManifestSource train(read_manifest(manifest_path(ctx.flags.train.front())));
  if (train.manifest().split != Split::train) fail(ErrorKind::manifest, "fit needs a train split manifest");
  if (train.size() == 0) fail(ErrorKind::insufficient_data, "training split is empty");
  if (mc.method == EmbeddingMethod::random) {
    std::size_t total = 0;
    for (const auto& l : layer_channels(train.features(0))) total += l.channels;
    mc.random = make_random_selection(resolve_seed(ctx, 0), total, random_dims);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const PatchGaussianModel model = fit_model(train, mc, ctx.threads);
  save_model(model, ctx.flags.out);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  *ctx.out << "fit: N=" << model.gaussians.sample_count << " D_W=" << model.gaussians.dims
           << " P=" << model.gaussians.locations() << " eps=" << fmt("%g", model.gaussians.epsilon)
           << " elapsed=" << fmt("%.3f", dt) << "s\n";
}

void cmd_score(Context& ctx) {
  if (ctx.flags.model.empty() || ctx.flags.test.size() != 1 || ctx.flags.out.empty()) {
    fail(ErrorKind::config, "score needs --model DIR, one --test MANIFEST and --out DIR");
  }
  const PatchGaussianModel model = load_model(ctx.flags.model);
  const ManifestSource test(read_manifest(manifest_path(ctx.flags.test.front())));
  const fs::path out(ctx.flags.out);
  std::error_code ec;
  fs::create_directories(out / "heatmaps", ec);
  if (ec) fail(ErrorKind::io, "cannot create " + (out / "heatmaps").string());
  std::ofstream csv(out / "scores.csv", std::ios::binary);
  if (!csv) fail(ErrorKind::io, "cannot write " + (out / "scores.csv").string());
  csv << "image_id,image_score\n";
  for (std::size_t i = 0; i < test.size(); ++i) {
    const AnomalyResult r = score_image(model, test.features(i), ctx.threads);
    export_heatmap(r, out / "heatmaps" / (r.image_id + ".pgm"), std::nullopt);
    csv << r.image_id << ',' << fmt("%.17g", r.image_score) << '\n';
  }
  if (!csv) fail(ErrorKind::io, "write failed: " + (out / "scores.csv").string());
  *ctx.out << "score: images=" << test.size() << " out=" << out.string() << "\n";
}

void cmd_eval(Context& ctx) {
  if (ctx.flags.model.empty() || ctx.flags.test.size() != 1) {
    fail(ErrorKind::config, "eval needs --model DIR and one --test MANIFEST");
  }
  const PatchGaussianModel model = load_model(ctx.flags.model);
  const ManifestSource test(read_manifest(manifest_path(ctx.flags.test.front())));
  const auto t0 = std::chrono::steady_clock::now();
  const ClassMetrics m = evaluate_model(test, model, ctx.threads);
  SweepRecord r;
  r.class_name = test.class_name();
  r.backbone = resolve_backbone(ctx);
  r.config = model.config.wavelet;
  r.config.layers.clear();
  r.image_auc = m.image_auc;
  r.pixel_auc = m.pixel_auc;
  r.score_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  *ctx.out << "eval: class=" << r.class_name << " image_auc=" << fmt("%.6f", r.image_auc)
           << " pixel_auc=" << fmt("%.6f", r.pixel_auc) << "\n";
  if (!ctx.flags.out.empty()) {
    fs::create_directories(ctx.flags.out);
    write_results({r}, fs::path(ctx.flags.out) / "eval.csv");
  }
}

void cmd_sweep(Context& ctx) {
  if (ctx.flags.out.empty()) fail(ErrorKind::config, "sweep needs --out DIR");
  if (ctx.flags.train.size() != ctx.flags.test.size()) {
    fail(ErrorKind::config, "--train and --test must be given in pairs");
  }
  const SweepGrid grid = sweep_grid(ctx.config);
  bool timing = ctx.config.boolean("sweep.record_timing").value_or(true);
  if (ctx.flags.no_timing) timing = false;

  std::vector<std::pair<fs::path, fs::path>> pairs;
  for (const auto& c : ctx.flags.corpora) pairs.emplace_back(fs::path(c) / "train", fs::path(c) / "test");
  for (std::size_t i = 0; i < ctx.flags.train.size(); ++i) pairs.emplace_back(ctx.flags.train[i], ctx.flags.test[i]);
  if (pairs.empty()) fail(ErrorKind::config, "sweep needs --corpus DIR or --train/--test pairs");

  std::vector<ManifestSource> sources;
  sources.reserve(2 * pairs.size());
  std::vector<ClassSplits> classes;
  std::vector<std::string> names;
  for (const auto& [tr, te] : pairs) {
    sources.emplace_back(read_manifest(manifest_path(tr.string())));
    sources.emplace_back(read_manifest(manifest_path(te.string())));
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    classes.push_back({&sources[2 * i], &sources[2 * i + 1]});
    names.push_back(sources[2 * i].class_name());
  }

  SweepOptions opts;
  opts.backbone = resolve_backbone(ctx);
  opts.threads = ctx.threads;
  opts.record_timing = timing;

  const fs::path dir(ctx.flags.out);
  fs::create_directories(dir);
  const fs::path csv_path = dir / "results.csv";
  const fs::path hash_path = dir / "results.csv.gridhash";
  const std::string hash = grid_hash(grid, names, opts.backbone);

  std::vector<SweepRecord> previous;
  if (fs::exists(csv_path) && !ctx.flags.overwrite) {
    std::ifstream h(hash_path);
    std::string stored;
    std::getline(h, stored);
    if (stored != hash) {
      fail(ErrorKind::config, "existing " + csv_path.string() +
                                  " was written for a different grid; use --overwrite or another --out");
    }
    previous = read_results(csv_path);
    for (const auto& r : previous) opts.completed.insert(record_key(r));
  }
  // Rewrite complete rows only, dropping any partial trailing line.
  write_results(previous, csv_path);
  {
    std::ofstream h(hash_path, std::ios::binary);
    h << hash << '\n';
    if (!h) fail(ErrorKind::io, "cannot write " + hash_path.string());
  }
  std::ofstream csv(csv_path, std::ios::binary | std::ios::app);
  if (!csv) fail(ErrorKind::io, "cannot append to " + csv_path.string());
  std::size_t failed = 0;
  opts.on_record = [&](const SweepRecord& r) {
    csv << format_record(r) << '\n';
    csv.flush();
    if (!csv) fail(ErrorKind::io, "write failed: " + csv_path.string());
    if (!r.ok()) ++failed;
  };
  const auto records = sweep(classes, grid, opts);
  *ctx.out << "sweep: grid=" << grid.size() << " classes=" << classes.size() << " new=" << records.size()
           << " resumed=" << previous.size() << " failed=" << failed << " out=" << csv_path.string() << "\n";
}

void cmd_report(Context& ctx) {
  if (ctx.flags.results.empty()) fail(ErrorKind::config, "report needs a results CSV");
  const auto records = read_results(fs::path(ctx.flags.results));
  const std::string text = render_report(build_report(records));
  if (ctx.flags.out.empty()) {
    *ctx.out << text;
  } else {
    std::ofstream f(ctx.flags.out, std::ios::binary);
    if (!f) fail(ErrorKind::io, "cannot write " + ctx.flags.out);
    f << text;
  }
}

void add_model_flags(CLI::App* c, Flags& f) {
  c->add_option("--method", f.method, "wavelet (default) or random");
  c->add_option("--wavelet", f.wavelet, "haar, db2, db4 or sym4");
  c->add_option("--level", f.level, "DWT level J");
  c->add_option("--subbands", f.subbands, "e.g. LL,LH,HL or HL_LH_LL or all");
  c->add_option("--sigma", f.sigma, "anomaly-map smoothing; 0 disables");
  c->add_option("--cov-reg", f.cov_reg, "covariance regularization epsilon");
  c->add_option("--random-dims", f.random_dims, "channels kept by the random baseline");
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
      return kExitUsage;
    case ErrorKind::model_compatibility:
      return kExitCompatibility;
    case ErrorKind::numerical:
      return kExitNumerical;
    default:
      return kExitData;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  Flags& f = ctx.flags;

  CLI::App app{"Wavelet-enhanced patch distribution modeling for anomaly detection", "wepadim"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", f.config, "TOML-style configuration file");
  app.add_option("--threads", f.threads, "worker threads (falls back to WEPADIM_THREADS)");
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--out", f.out, "output directory (report: output file)");
  app.add_option("--backbone", f.backbone, "backbone tag recorded with results");

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus");
  synth->add_option("--image-size", f.image_size, "N or HxW");
  synth->add_option("--n-train", f.n_train);
  synth->add_option("--n-test-normal", f.n_test_normal);
  synth->add_option("--n-test-anomalous", f.n_test_anomalous);
  synth->add_option("--texture", f.texture, "smooth-noise or stripes");
  synth->add_option("--anomaly", f.anomaly, "lowfreq-blob or highfreq-speckle");
  synth->add_option("--magnitude", f.magnitude);
  synth->add_option("--class", f.class_name);
  synth->add_option("--stages", f.stages, "extractor stages, e.g. 64x4,128x8,256x16");

  auto* fit = app.add_subcommand("fit", "fit a model on a train manifest");
  fit->add_option("--train", f.train, "train manifest (file or directory)");
  add_model_flags(fit, f);

  auto* score = app.add_subcommand("score", "write heatmaps and image scores");
  score->add_option("--model", f.model, "model bundle directory");
  score->add_option("--test", f.test, "test manifest (file or directory)");

  auto* eval = app.add_subcommand("eval", "image and pixel ROC AUC of a model");
  eval->add_option("--model", f.model, "model bundle directory");
  eval->add_option("--test", f.test, "test manifest (file or directory)");

  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a hyperparameter grid");
  sweep_cmd->add_option("--corpus", f.corpora, "directory holding train/ and test/ manifests");
  sweep_cmd->add_option("--train", f.train, "train manifest, paired with --test");
  sweep_cmd->add_option("--test", f.test, "test manifest, paired with --train");
  sweep_cmd->add_flag("--no-timing", f.no_timing, "write zero timings (byte-stable output)");
  sweep_cmd->add_flag("--overwrite", f.overwrite, "discard an existing results.csv");

  auto* report = app.add_subcommand("report", "summary tables from results.csv");
  report->add_option("results", f.results, "results CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!f.config.empty()) {
      ctx.config = ConfigFile::load(f.config);
      ctx.config.reject_unknown(kAllowedKeys);
    }
    ctx.threads = resolve_threads(f, ctx.config);
    if (synth->parsed()) cmd_synth(ctx);
    else if (fit->parsed()) cmd_fit(ctx);
    else if (score->parsed()) cmd_score(ctx);
    else if (eval->parsed()) cmd_eval(ctx);
    else if (sweep_cmd->parsed()) cmd_sweep(ctx);
    else if (report->parsed()) cmd_report(ctx);
    return kExitOk;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace wepadim::cli
