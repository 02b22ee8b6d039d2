// Desk-scale acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "report_fixture.hpp"
#include "test_util.hpp"
#include "wepadim/analysis.hpp"
#include "wepadim/dwt.hpp"
#include "wepadim/embed.hpp"
#include "wepadim/gaussian.hpp"
#include "wepadim/metrics.hpp"
#include "wepadim/pipeline.hpp"
#include "wepadim/report.hpp"
#include "wepadim/sweep.hpp"
#include "wepadim/synth.hpp"

namespace wepadim {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> warnings;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_err(double got, double want) { return std::fabs(got - want) / std::max(std::fabs(want), 1e-300); }

// Three-stage random pyramid sized for a laptop: 56 channels instead of 448
// keep the 224 x 224 covariance tables in memory.
const std::vector<StageSpec> kDeskStages = {{8, 4}, {16, 8}, {32, 16}};

Outcome dwt_reconstruction() {
  Outcome o;
  double worst = 0.0;
  std::uint64_t seed = 100;
  for (const auto& name : supported_wavelets()) {
    const WaveletFamily f = filter_bank(name);
    for (const int level : {1, 2}) {
      const Tensor x = test::random_tensor({3, 56, 56}, seed++);
      worst = std::max(worst, test::max_abs_diff(idwt2d(dwt2d(x, f, level), f, {56, 56}), x));
    }
  }
  o.require(worst < 1e-8, "max error " + fmt("%.3g", worst));
  o.detail = o.pass ? "max abs error " + fmt("%.3g", worst) : o.detail;
  return o;
}

Outcome haar_invariants() {
  Outcome o;
  const WaveletFamily haar = filter_bank("haar");
  const Tensor x({1, 2, 2}, {1.0, 2.0, 3.0, 5.0});
  const SubbandPyramid p = dwt2d(x, haar, 1);
  const DetailBands& d = p.details[0];
  double err = std::fabs(p.ll.values()[0] - 5.5);
  err = std::max(err, std::fabs(d.hl.values()[0] - (2.0 - 1.0 + 5.0 - 3.0) / 2.0));
  err = std::max(err, std::fabs(d.lh.values()[0] - (3.0 + 5.0 - 1.0 - 2.0) / 2.0));
  err = std::max(err, std::fabs(d.hh.values()[0] - (1.0 - 2.0 - 3.0 + 5.0) / 2.0));
  o.require(err < 1e-12, "2x2 closed form off by " + fmt("%.3g", err));

  // constant input: interior coefficients keep a full filter support away
  // from the zero padding
  const double c = -0.625;
  Tensor k = Tensor::zeros({2, 32, 32});
  for (double& v : k.values()) v = c;
  double worst = 0.0;
  for (const auto& name : supported_wavelets()) {
    const WaveletFamily f = filter_bank(name);
    for (const int level : {1, 2}) {
      const SubbandPyramid q = dwt2d(k, f, level);
      const std::size_t scale = std::size_t{1} << level;
      const std::size_t reach = (scale - 1) * (f.length() - 1);
      const std::size_t n = q.ll.extent(1);
      const auto interior = [&](std::size_t i) { return scale * i + scale - 1 >= reach && scale * i + scale - 1 < 32; };
      for (std::size_t ch = 0; ch < 2; ++ch) {
        for (std::size_t y = 0; y < n; ++y) {
          for (std::size_t x2 = 0; x2 < n; ++x2) {
            if (!interior(y) || !interior(x2)) continue;
            const DetailBands& top = q.details.back();
            worst = std::max(worst, std::fabs(q.ll(ch, y, x2) - std::pow(2.0, level) * c));
            worst = std::max({worst, std::fabs(top.lh(ch, y, x2)), std::fabs(top.hl(ch, y, x2)),
                              std::fabs(top.hh(ch, y, x2))});
          }
        }
      }
    }
  }
  o.require(worst < 1e-12, "constant-input interior off by " + fmt("%.3g", worst));
  if (o.pass) o.detail = "closed form and interior invariants within " + fmt("%.3g", std::max(err, worst));
  return o;
}

Outcome moment_accumulation() {
  Outcome o;
  const ImageSize grid{4, 4};
  const auto emb = test::random_embeddings(32, grid, 8, 11);
  MomentAccumulator acc(grid, 8);
  for (const auto& e : emb) acc.add(e);
  const PatchGaussians g = finalize(acc, 0.0);
  const test::TwoPassFit oracle = test::two_pass_fit(emb);
  double worst = 0.0;
  for (std::size_t p = 0; p < 16; ++p) {
    for (std::size_t i = 0; i < 8; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      worst = std::max(worst, rel_err(g.means.values()[p * 8 + i], oracle.means[p](ii)));
      for (std::size_t j = 0; j <= i; ++j) {
        double cov = 0.0;
        for (std::size_t k = 0; k <= j; ++k) {
          cov += g.chol.values()[(p * 8 + i) * 8 + k] * g.chol.values()[(p * 8 + j) * 8 + k];
        }
        const double want = oracle.covariances[p](ii, static_cast<Eigen::Index>(j));
        // relative to the diagonal scale so near-zero off-diagonals do not dominate
        const double scale = std::sqrt(oracle.covariances[p](ii, ii) *
                                       oracle.covariances[p](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
        worst = std::max(worst, std::fabs(cov - want) / scale);
      }
    }
  }
  o.require(worst < 1e-10, "two-pass relative error " + fmt("%.3g", worst));

  // merge: chunked accumulation reduced in a fixed order
  auto exact = emb;
  for (auto& e : exact) {
    for (double& v : e.data.values()) v = std::round(8.0 * v);
  }
  MomentAccumulator seq(grid, 8), left(grid, 8), right(grid, 8);
  for (std::size_t i = 0; i < 32; ++i) {
    seq.add(exact[i]);
    (i < 16 ? left : right).add(exact[i]);
  }
  left.merge(right);
  o.require(left == seq, "merged accumulator differs from sequential");
  for (const int threads : {2, 8}) {
    MomentAccumulator par(grid, 8);
    par.add_all(emb, threads);
    o.require(par == acc, "parallel accumulation with " + std::to_string(threads) + " threads not bitwise equal");
  }
  if (o.pass) o.detail = "two-pass relative error " + fmt("%.3g", worst) + ", merge and parallel sums bitwise equal";
  return o;
}

Outcome mahalanobis() {
  Outcome o;
  const ImageSize grid{4, 4};
  const auto emb = test::random_embeddings(24, grid, 8, 21);
  MomentAccumulator acc(grid, 8);
  for (const auto& e : emb) acc.add(e);
  const test::TwoPassFit oracle = test::two_pass_fit(emb);
  const auto probes = test::random_embeddings(4, grid, 8, 22);
  double worst = 0.0;
  for (const double eps : {0.0, 0.01, 0.1}) {
    const PatchGaussians g = finalize(acc, eps);
    for (const auto& probe : probes) {
      const Tensor map = mahalanobis_map(g, probe);
      for (std::size_t p = 0; p < 16; ++p) {
        const double want =
            test::dense_mahalanobis(test::vector_at(probe, p), oracle.means[p], oracle.covariances[p], eps);
        worst = std::max(worst, rel_err(map.values()[p], want));
      }
    }
  }
  o.require(worst < 1e-8, "dense-inverse relative error " + fmt("%.3g", worst));

  const PatchGaussians g = finalize(acc, 0.01);
  EmbeddingMap at_mean = emb[0];
  for (std::size_t p = 0; p < 16; ++p) {
    for (std::size_t c = 0; c < 8; ++c) at_mean.data.values()[c * 16 + p] = g.means.values()[p * 8 + c];
  }
  double at_mu = 0.0;
  const Tensor mu_map = mahalanobis_map(g, at_mean);
  for (const double v : mu_map.values()) at_mu = std::max(at_mu, std::fabs(v));
  o.require(at_mu == 0.0, "score at the mean is " + fmt("%.3g", at_mu));

  int violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto train = test::random_embeddings(6, {1, 2}, 4, 1000 + seed);
    MomentAccumulator a({1, 2}, 4);
    for (const auto& e : train) a.add(e);
    const auto probe = test::random_embeddings(1, {1, 2}, 4, 5000 + seed);
    std::vector<double> previous(2, INFINITY);
    for (const double eps : {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const Tensor m = mahalanobis_map(finalize(a, eps), probe[0]);
      for (std::size_t p = 0; p < 2; ++p) {
        if (m.values()[p] > previous[p] * (1.0 + 1e-12)) ++violations;
        previous[p] = m.values()[p];
      }
    }
  }
  o.require(violations == 0, std::to_string(violations) + " increases in epsilon");
  if (o.pass) o.detail = "dense-inverse relative error " + fmt("%.3g", worst) + ", 0 at mean, monotone on 100 instances";
  return o;
}

Outcome roc_auc_exactness() {
  Outcome o;
  Rng rng(4242);
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (int i = 0; i < 200; ++i) {
    const bool pos = i % 3 == 0;
    labels.push_back(pos);
    scores.push_back(std::round(5.0 * (rng.normal() + (pos ? 0.7 : 0.0))) / 5.0);
  }
  const double auc = roc_auc(scores, labels);
  const double oracle = test::pairwise_auc(scores, labels);
  o.require(std::fabs(auc - oracle) <= 1e-12, "AUC " + fmt("%.17g", auc) + " vs oracle " + fmt("%.17g", oracle));
  std::vector<double> t1, t2;
  for (const double s : scores) {
    t1.push_back(std::exp(s));
    t2.push_back(s * s * s - 7.0);
  }
  o.require(roc_auc(t1, labels) == auc && roc_auc(t2, labels) == auc, "not invariant under monotone transforms");
  if (o.pass) o.detail = "AUC " + fmt("%.6f", auc) + " equals pairwise oracle; exp and cubic transforms exact";
  return o;
}

Outcome dimension_contract() {
  Outcome o;
  const FeatureStack stack = test::resnet_stack(3);
  const WaveletFamily haar = filter_bank("haar");
  for (const SubbandSet& s : SubbandSet::all_nonempty()) {
    const EmbeddingMap a = build_embedding(stack, haar, 1, s);
    o.require(a.dims() == s.size() * 448 && a.data.extent(0) == s.size() * 448,
              s.key() + " has D_W " + std::to_string(a.dims()));
    o.require(a.channel_layout == build_embedding(stack, haar, 1, s).channel_layout &&
                  a.channel_layout == wavelet_channel_layout(layer_channels(stack), s),
              s.key() + " layout not deterministic");
  }
  if (o.pass) o.detail = "D_W = |S| * 448 for all 15 subband sets";
  return o;
}

SynthSpec desk_spec(std::uint64_t seed, AnomalyKind kind) {
  SynthSpec s;
  s.seed = seed;
  s.anomaly_kind = kind;
  return s;
}

ModelConfig config_for(const char* subbands) {
  ModelConfig c;
  c.wavelet.wavelet = "haar";
  c.wavelet.level = 1;
  c.wavelet.subbands = SubbandSet::parse(subbands);
  c.wavelet.sigma = 2.0;
  c.wavelet.cov_reg = 0.01;
  return c;
}

Outcome end_to_end() {
  Outcome o;
  const SynthSpec spec = desk_spec(7, AnomalyKind::lowfreq_blob);
  const PyramidExtractor ex(spec.seed, kDeskStages);
  const SynthCorpus c = synthesize(spec, ex);
  const ModelConfig cfg = config_for("LL,LH,HL");
  const ClassMetrics m = evaluate_model(c.test, fit_model(c.train, cfg));
  const SynthCorpus again = synthesize(spec, ex);
  const ClassMetrics r = evaluate_model(again.test, fit_model(again.train, cfg));
  o.require(m.image_auc >= 0.90, "image AUC " + fmt("%.4f", m.image_auc) + " < 0.90");
  o.require(m.pixel_auc >= 0.85, "pixel AUC " + fmt("%.4f", m.pixel_auc) + " < 0.85");
  o.require(m.image_auc == r.image_auc && m.pixel_auc == r.pixel_auc && m.image_scores == r.image_scores,
            "repeat run differs");
  if (o.pass) {
    o.detail = "image AUC " + fmt("%.4f", m.image_auc) + ", pixel AUC " + fmt("%.4f", m.pixel_auc) +
               ", repeat run bitwise identical";
  }
  return o;
}

Outcome frequency_selectivity() {
  Outcome o;
  double speckle_full = 0.0, speckle_ll = 0.0, blob_ll = 0.0, blob_hh = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    {
      const SynthSpec spec = desk_spec(seed, AnomalyKind::highfreq_speckle);
      const SynthCorpus c = synthesize(spec, PyramidExtractor(seed, kDeskStages));
      const double full = evaluate_model(c.test, fit_model(c.train, config_for("LL,LH,HL"))).pixel_auc;
      const double ll = evaluate_model(c.test, fit_model(c.train, config_for("LL"))).pixel_auc;
      speckle_full += full / 5.0;
      speckle_ll += ll / 5.0;
      if (!(full > ll)) {
        o.warnings.push_back("seed " + std::to_string(seed) + ": speckle pixel AUC LL,LH,HL " + fmt("%.5f", full) +
                             " <= LL " + fmt("%.5f", ll));
      }
    }
    {
      const SynthSpec spec = desk_spec(seed, AnomalyKind::lowfreq_blob);
      const SynthCorpus c = synthesize(spec, PyramidExtractor(seed, kDeskStages));
      const double ll = evaluate_model(c.test, fit_model(c.train, config_for("LL"))).image_auc;
      const double hh = evaluate_model(c.test, fit_model(c.train, config_for("HH"))).image_auc;
      blob_ll += ll / 5.0;
      blob_hh += hh / 5.0;
      if (!(ll >= hh)) {
        o.warnings.push_back("seed " + std::to_string(seed) + ": blob image AUC LL " + fmt("%.4f", ll) + " < HH " +
                             fmt("%.4f", hh));
      }
    }
  }
  o.require(speckle_full > speckle_ll,
            "mean speckle pixel AUC " + fmt("%.5f", speckle_full) + " <= " + fmt("%.5f", speckle_ll));
  o.require(blob_ll >= blob_hh, "mean blob image AUC LL " + fmt("%.4f", blob_ll) + " < HH " + fmt("%.4f", blob_hh));
  if (o.pass) {
    o.detail = "speckle pixel AUC LL,LH,HL " + fmt("%.5f", speckle_full) + " > LL " + fmt("%.5f", speckle_ll) +
               "; blob image AUC LL " + fmt("%.4f", blob_ll) + " >= HH " + fmt("%.4f", blob_hh);
  }
  return o;
}

Outcome sweep_reuse() {
  Outcome o;
  SynthSpec spec;
  spec.image_size = {64, 64};
  spec.n_train = 16;
  spec.n_test_normal = 6;
  spec.n_test_anomalous = 6;
  spec.anomaly_magnitude = 6.0;
  const SynthCorpus c = synthesize(spec, PyramidExtractor(spec.seed, kDeskStages));
  const std::vector<ClassSplits> classes = {{&c.train, &c.test}};
  SweepGrid grid;
  grid.wavelets = {"haar", "db2"};
  grid.subbands = {SubbandSet::parse("LL"), SubbandSet::parse("LL,LH,HL")};
  grid.sigmas = {0.0, 2.0, 4.0};
  grid.cov_regs = {0.1, 0.01, 0.001};
  SweepOptions opt;
  opt.record_timing = false;
  const auto fast = sweep(classes, grid, opt);
  const auto slow = sweep_by_refit(classes, grid, opt);
  double worst = 0.0;
  o.require(fast.size() == slow.size() && fast.size() == grid.size(), "record counts differ");
  for (std::size_t i = 0; i < std::min(fast.size(), slow.size()); ++i) {
    o.require(fast[i].ok() && slow[i].ok(), "failed record " + record_key(fast[i]));
    worst = std::max({worst, rel_err(fast[i].image_auc, slow[i].image_auc),
                      rel_err(fast[i].pixel_auc, slow[i].pixel_auc)});
  }
  o.require(worst < 1e-10, "refit relative error " + fmt("%.3g", worst));

  const auto csv = [&](int threads) {
    SweepOptions t = opt;
    t.threads = threads;
    std::ostringstream out;
    write_results(sweep(classes, grid, t), out);
    return out.str();
  };
  o.require(csv(1) == csv(8), "CSV differs between 1 and 8 threads");
  if (o.pass) {
    o.detail = std::to_string(fast.size()) + " configs, refit relative error " + fmt("%.3g", worst) +
               ", CSV bitwise identical for 1 and 8 threads";
  }
  return o;
}

Outcome report_fixtures() {
  Outcome o;
  const auto records = test::report_fixture_records();
  const TextTable img = per_class_table(records, Metric::image_auc);
  const TextTable pix = per_class_table(records, Metric::pixel_auc);
  o.require(img.rows == test::expected_per_class_image_rows() && img.footer == test::expected_per_class_image_footer(),
            "per-class image table differs");
  o.require(pix.rows == test::expected_per_class_pixel_rows() && pix.footer == test::expected_per_class_pixel_footer(),
            "per-class pixel table differs");
  o.require(impact_report_table(records).rows == test::expected_impact_rows(), "component impact table differs");
  o.require(subband_table(records).rows == test::expected_subband_rows(), "subband table differs");
  if (o.pass) o.detail = "tie consolidation, component impact and subband tables match";
  return o;
}

}  // namespace
}  // namespace wepadim

int main() {
  using namespace wepadim;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"DWT perfect reconstruction", dwt_reconstruction},
      {"Haar closed form and constant input", haar_invariants},
      {"Gaussian moments and merge", moment_accumulation},
      {"Mahalanobis against dense inverse", mahalanobis},
      {"ROC AUC exactness", roc_auc_exactness},
      {"Embedding dimension contract", dimension_contract},
      {"End-to-end synthetic run", end_to_end},
      {"Frequency selectivity direction", frequency_selectivity},
      {"Sweep moment reuse and thread determinism", sweep_reuse},
      {"Report fixtures", report_fixtures},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& w : o.warnings) std::printf("  warning: %s\n", w.c_str());
    std::printf("%s criterion %zu: %s (%s) [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), dt);
    std::fflush(stdout);
    failures += !o.pass;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1fs\n", static_cast<int>(criteria.size()) - failures, criteria.size(),
              total);
  return failures == 0 ? 0 : 1;
}
