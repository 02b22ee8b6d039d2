#include "wepadim/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <optional>

#include "wepadim/error.hpp"
#include "wepadim/hash.hpp"
#include "wepadim/pipeline.hpp"

namespace wepadim {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string failure_status(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return "failed:" + std::string(to_string(err->kind())) + ": " + err->what();
  }
  return std::string("failed:internal: ") + e.what();
}

SweepRecord failed_record(SweepRecord r, const std::string& status) {
  r.image_auc = std::numeric_limits<double>::quiet_NaN();
  r.pixel_auc = std::numeric_limits<double>::quiet_NaN();
  r.status = status;
  return r;
}

void check_splits(const std::vector<ClassSplits>& classes) {
  for (const auto& c : classes) {
    if (c.train == nullptr || c.test == nullptr) fail(ErrorKind::config, "class is missing a split");
    for (std::size_t i = 0; i < c.train->size(); ++i) {
      if (c.train->label(i) != Label::normal) {
        fail(ErrorKind::manifest, "training sample '" + c.train->id(i) + "' is not normal");
      }
    }
  }
}

// Emits a record unless it was completed by an earlier run.
class Sink {
 public:
  explicit Sink(const SweepOptions& options) : options_(options) {}

  bool wanted(const SweepRecord& r) const { return !options_.completed.contains(record_key(r)); }

  void emit(SweepRecord r) {
    if (!wanted(r)) return;
    if (!options_.record_timing) {
      r.fit_seconds = 0.0;
      r.score_seconds = 0.0;
    }
    if (options_.on_record) options_.on_record(r);
    out_.push_back(std::move(r));
  }

  std::vector<SweepRecord> take() { return std::move(out_); }

 private:
  const SweepOptions& options_;
  std::vector<SweepRecord> out_;
};

}  // namespace

void SweepGrid::validate() const {
  if (size() == 0) fail(ErrorKind::config, "sweep grid has an empty axis");
  // repeated values would emit duplicate rows under one resume key
  const auto unique_axis = [](auto values, const char* axis) {
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
      fail(ErrorKind::config, std::string("sweep grid axis '") + axis + "' has a repeated value");
    }
  };
  unique_axis(wavelets, "wavelets");
  unique_axis(levels, "levels");
  std::vector<std::uint8_t> bits;
  for (const auto& s : subbands) bits.push_back(s.bits());
  unique_axis(bits, "subbands");
  unique_axis(sigmas, "sigmas");
  unique_axis(cov_regs, "cov_regs");
  for (const auto& w : wavelets) {
    for (const int l : levels) {
      WaveletConfig c;
      c.wavelet = w;
      c.level = l;
      c.validate();
    }
  }
  for (const double s : sigmas) {
    if (!(s >= 0.0)) fail(ErrorKind::config, "sigma must be >= 0");
  }
  for (const double e : cov_regs) {
    if (!(e >= 0.0)) fail(ErrorKind::config, "cov_reg must be >= 0");
  }
}

std::string grid_hash(const SweepGrid& grid, const std::vector<std::string>& classes, const std::string& backbone) {
  std::string text = "backbone=" + backbone + "\nclasses=";
  for (const auto& c : classes) text += c + ';';
  text += "\nwavelets=";
  for (const auto& w : grid.wavelets) text += w + ';';
  text += "\nlevels=";
  for (const int l : grid.levels) text += std::to_string(l) + ';';
  text += "\nsubbands=";
  for (const auto& s : grid.subbands) text += s.key() + ';';
  char buf[40];
  text += "\nsigmas=";
  for (const double s : grid.sigmas) {
    std::snprintf(buf, sizeof buf, "%.17g;", s);
    text += buf;
  }
  text += "\ncov_regs=";
  for (const double e : grid.cov_regs) {
    std::snprintf(buf, sizeof buf, "%.17g;", e);
    text += buf;
  }
  return hex64(fnv1a64(text));
}

std::vector<SweepRecord> sweep(const std::vector<ClassSplits>& classes, const SweepGrid& grid,
                               const SweepOptions& options) {
  grid.validate();
  check_splits(classes);
  Sink sink(options);

  for (const auto& split : classes) {
    const SampleSource& train = *split.train;
    const SampleSource& test = *split.test;
    std::optional<std::vector<Tensor>> masks;
    std::vector<Label> labels(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) labels[i] = test.label(i);

    for (const auto& wavelet : grid.wavelets) {
      for (const int level : grid.levels) {
        for (const auto& subbands : grid.subbands) {
          // Records of this embedding group, sigma-major like the output.
          std::vector<SweepRecord> group;
          bool any_wanted = false;
          for (const double sigma : grid.sigmas) {
            for (const double eps : grid.cov_regs) {
              SweepRecord r;
              r.class_name = train.class_name();
              r.backbone = options.backbone;
              r.config.wavelet = wavelet;
              r.config.level = level;
              r.config.subbands = subbands;
              r.config.sigma = sigma;
              r.config.cov_reg = eps;
              any_wanted = any_wanted || sink.wanted(r);
              group.push_back(std::move(r));
            }
          }
          if (!any_wanted) continue;

          const std::size_t n_eps = grid.cov_regs.size();
          auto at = [&](std::size_t si, std::size_t ei) -> SweepRecord& { return group[si * n_eps + ei]; };

          std::optional<MomentAccumulator> acc;
          std::vector<EmbeddingMap> test_embeddings;
          double fit_shared = 0.0;
          double score_shared = 0.0;
          try {
            ModelConfig mc;
            mc.wavelet = group.front().config;
            const Embedder embedder(mc);
            auto t0 = Clock::now();
            acc.emplace(accumulate_source(train, embedder, options.threads, options.batch));
            fit_shared = seconds_since(t0);
            t0 = Clock::now();
            test_embeddings = embed_samples(test, embedder, 0, test.size(), options.threads);
            if (!masks) {
              masks.emplace(test.size());
              for (std::size_t i = 0; i < test.size(); ++i) (*masks)[i] = test.mask(i);
            }
            score_shared = seconds_since(t0);
          } catch (const std::exception& e) {
            const std::string status = failure_status(e);
            for (auto& r : group) sink.emit(failed_record(r, status));
            continue;
          }

          for (std::size_t ei = 0; ei < n_eps; ++ei) {
            std::vector<Tensor> raw(test.size());
            double fit_eps = 0.0;
            double maha = 0.0;
            try {
              auto t0 = Clock::now();
              const PatchGaussians g = finalize(*acc, grid.cov_regs[ei], options.threads);
              fit_eps = seconds_since(t0);
              t0 = Clock::now();
              for (std::size_t i = 0; i < test.size(); ++i) {
                raw[i] = mahalanobis_map(g, test_embeddings[i], options.threads);
              }
              maha = seconds_since(t0);
            } catch (const std::exception& e) {
              const std::string status = failure_status(e);
              for (std::size_t si = 0; si < grid.sigmas.size(); ++si) at(si, ei) = failed_record(at(si, ei), status);
              continue;
            }
            for (std::size_t si = 0; si < grid.sigmas.size(); ++si) {
              SweepRecord& r = at(si, ei);
              if (!sink.wanted(r)) continue;
              try {
                const auto t0 = Clock::now();
                const ClassMetrics m =
                    evaluate_maps(raw, *masks, labels, test.input_size(), grid.sigmas[si], options.threads);
                r.image_auc = m.image_auc;
                r.pixel_auc = m.pixel_auc;
                r.fit_seconds = fit_shared + fit_eps;
                r.score_seconds = score_shared + maha + seconds_since(t0);
              } catch (const std::exception& e) {
                r = failed_record(r, failure_status(e));
              }
            }
          }
          for (auto& r : group) sink.emit(std::move(r));
        }
      }
    }
  }
  return sink.take();
}

std::vector<SweepRecord> sweep_by_refit(const std::vector<ClassSplits>& classes, const SweepGrid& grid,
                                        const SweepOptions& options) {
  grid.validate();
  check_splits(classes);
  Sink sink(options);
  for (const auto& split : classes) {
    for (const auto& wavelet : grid.wavelets) {
      for (const int level : grid.levels) {
        for (const auto& subbands : grid.subbands) {
          for (const double sigma : grid.sigmas) {
            for (const double eps : grid.cov_regs) {
              SweepRecord r;
              r.class_name = split.train->class_name();
              r.backbone = options.backbone;
              r.config.wavelet = wavelet;
              r.config.level = level;
              r.config.subbands = subbands;
              r.config.sigma = sigma;
              r.config.cov_reg = eps;
              if (!sink.wanted(r)) continue;
              try {
                ModelConfig mc;
                mc.wavelet = r.config;
                auto t0 = Clock::now();
                const PatchGaussianModel model = fit_model(*split.train, mc, options.threads);
                r.fit_seconds = seconds_since(t0);
                t0 = Clock::now();
                const ClassMetrics m = evaluate_model(*split.test, model, options.threads);
                r.score_seconds = seconds_since(t0);
                r.image_auc = m.image_auc;
                r.pixel_auc = m.pixel_auc;
              } catch (const std::exception& e) {
                r = failed_record(r, failure_status(e));
              }
              sink.emit(std::move(r));
            }
          }
        }
      }
    }
  }
  return sink.take();
}

}  // namespace wepadim
