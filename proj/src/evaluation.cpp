#include "vtp/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "json.hpp"
#include "vtp/errors.hpp"

namespace vtp::evaluation {

namespace {

double displacement_at(std::span<const double> pred, std::span<const double> truth, int n, int t,
                       int v) {
  const std::size_t base = (static_cast<std::size_t>(t) * n + v) * 2;
  const double dx = pred[base] - truth[base];
  const double dy = pred[base + 1] - truth[base + 1];
  return std::sqrt(dx * dx + dy * dy);
}

void check_block(std::span<const double> pred, std::span<const double> truth, int n, int t_pred) {
  const std::size_t expect = static_cast<std::size_t>(n) * t_pred * 2;
  if (pred.size() != expect || truth.size() != expect) {
    throw DimensionError("displacement: expected " + std::to_string(expect) + " values, got " +
                         std::to_string(pred.size()) + " vs " + std::to_string(truth.size()));
  }
}

double mean(std::span<const double> xs) {
  double s = 0.0;
  for (const double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs, double mu) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (const double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

double ade(std::span<const double> pred, std::span<const double> truth, int n, int t_pred) {
  check_block(pred, truth, n, t_pred);
  double total = 0.0;
  for (int t = 0; t < t_pred; ++t) {
    for (int v = 0; v < n; ++v) total += displacement_at(pred, truth, n, t, v);
  }
  return total / (static_cast<double>(n) * t_pred);
}

double fde(std::span<const double> pred, std::span<const double> truth, int n, int t_pred) {
  check_block(pred, truth, n, t_pred);
  double total = 0.0;
  for (int v = 0; v < n; ++v) total += displacement_at(pred, truth, n, t_pred - 1, v);
  return total / static_cast<double>(n);
}

EvalResult evaluate(model::ModelParams& params, const std::vector<dataset::Sample>& samples) {
  EvalResult result;
  double ade_total = 0.0;
  double fde_total = 0.0;
  std::size_t fde_count = 0;

  for (const dataset::Sample& s : samples) {
    ad::Tape tape;
    const auto pred = model::forward(tape, params, s, /*teacher_forcing=*/false);

    std::vector<double> truth(pred.xy.size());
    for (int k = 0; k < s.t_pred; ++k) {
      for (int v = 0; v < s.n(); ++v) {
        truth[(static_cast<std::size_t>(k) * s.n() + v) * 2 + 0] = s.x(s.t_obs + k, v);
        truth[(static_cast<std::size_t>(k) * s.n() + v) * 2 + 1] = s.y(s.t_obs + k, v);
      }
    }

    SampleEval se;
    se.sample_id = s.id;
    se.n = s.n();
    se.per_step_mean.resize(s.t_pred);
    for (int k = 0; k < s.t_pred; ++k) {
      double step = 0.0;
      for (int v = 0; v < s.n(); ++v) {
        const double d = displacement_at(pred.xy, truth, s.n(), k, v);
        step += d;
        ade_total += d;
      }
      se.per_step_mean[k] = step / s.n();
    }
    se.ade = ade(pred.xy, truth, s.n(), s.t_pred);
    se.fde = fde(pred.xy, truth, s.n(), s.t_pred);
    fde_total += se.fde * s.n();
    fde_count += static_cast<std::size_t>(s.n());
    result.vessel_steps += static_cast<std::size_t>(s.n()) * s.t_pred;
    result.per_sample.push_back(std::move(se));
  }

  result.samples = samples.size();
  result.ade = result.vessel_steps ? ade_total / static_cast<double>(result.vessel_steps) : 0.0;
  result.fde = fde_count ? fde_total / static_cast<double>(fde_count) : 0.0;
  return result;
}

const VariantSummary* AblationReport::find(const std::string& variant) const {
  for (const auto& s : summary) {
    if (s.variant == variant) return &s;
  }
  return nullptr;
}

AblationReport ablation(const model::ModelConfig& base_cfg, const training::TrainConfig& base_tc,
                        const dataset::SplitSamples& splits,
                        std::span<const std::uint64_t> seeds, std::ostream* log,
                        std::vector<model::ModelParams>* full_models,
                        std::vector<std::vector<std::int64_t>>* full_exposures) {
  AblationReport report;
  for (const std::string& variant : model::variant_names()) {
    std::vector<double> ades, fdes;
    for (const std::uint64_t seed : seeds) {
      model::ModelConfig cfg = base_cfg;
      model::apply_variant(cfg, variant);
      training::TrainConfig tc = base_tc;
      tc.seed = seed;

      AblationRun run;
      run.variant = variant;
      run.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        auto trained = training::train(cfg, tc, splits.train, splits.val);
        run.failed = trained.diverged;
        if (!run.failed) {
          const auto eval = evaluate(trained.best_params, splits.test);
          run.test_ade = eval.ade;
          run.test_fde = eval.fde;
          run.best_epoch = trained.best_epoch;
          ades.push_back(eval.ade);
          fdes.push_back(eval.fde);
          if (variant == "full" && full_models) full_models->push_back(trained.best_params);
          if (variant == "full" && full_exposures) full_exposures->push_back(trained.exposure);
        }
      } catch (const NumericalError&) {
        run.failed = true;
      }
      run.train_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (log) {
        *log << "ablation: " << variant << " seed " << seed
             << (run.failed ? " FAILED" : " ade " + std::to_string(run.test_ade) + " fde " +
                                              std::to_string(run.test_fde))
             << " (" << std::fixed << std::setprecision(1) << run.train_s << " s)\n";
      }
      report.runs.push_back(run);
    }

    VariantSummary vs;
    vs.variant = variant;
    vs.runs = static_cast<int>(ades.size());
    vs.ade_mean = mean(ades);
    vs.ade_std = sample_std(ades, vs.ade_mean);
    vs.fde_mean = mean(fdes);
    vs.fde_std = sample_std(fdes, vs.fde_mean);
    report.summary.push_back(vs);
  }
  return report;
}

void write_ablation_table(std::ostream& out, const AblationReport& report) {
  out << std::left << std::setw(10) << "variant" << std::right << std::setw(12) << "ade_mean"
      << std::setw(12) << "ade_std" << std::setw(12) << "fde_mean" << std::setw(12) << "fde_std"
      << std::setw(7) << "runs" << '\n';
  for (const auto& s : report.summary) {
    out << std::left << std::setw(10) << s.variant << std::right << std::fixed
        << std::setprecision(5) << std::setw(12) << s.ade_mean << std::setw(12) << s.ade_std
        << std::setw(12) << s.fde_mean << std::setw(12) << s.fde_std << std::setw(7) << s.runs
        << '\n';
  }
}

void write_ablation_jsonl(std::ostream& out, const AblationReport& report) {
  for (const auto& r : report.runs) {
    nlohmann::ordered_json j;
    j["kind"] = "run";
    j["variant"] = r.variant;
    j["seed"] = r.seed;
    j["failed"] = r.failed;
    j["test_ade"] = r.test_ade;
    j["test_fde"] = r.test_fde;
    j["best_epoch"] = r.best_epoch;
    j["train_s"] = r.train_s;
    out << j.dump() << '\n';
  }
  for (const auto& s : report.summary) {
    nlohmann::ordered_json j;
    j["kind"] = "summary";
    j["variant"] = s.variant;
    j["runs"] = s.runs;
    j["ade_mean"] = s.ade_mean;
    j["ade_std"] = s.ade_std;
    j["fde_mean"] = s.fde_mean;
    j["fde_std"] = s.fde_std;
    out << j.dump() << '\n';
  }
}

}  // namespace vtp::evaluation
