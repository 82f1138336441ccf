// vtp: multi-vessel trajectory prediction with spatially and temporally
// attentive LSTM encoder-decoders over AIS data.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vtp/ais.hpp"
#include "vtp/checkpoint.hpp"
#include "vtp/dataset.hpp"
#include "vtp/domain_export.hpp"
#include "vtp/evaluation.hpp"
#include "vtp/gradcheck.hpp"
#include "vtp/io.hpp"
#include "vtp/model.hpp"
#include "vtp/synthetic.hpp"
#include "vtp/training.hpp"

namespace {

using nlohmann::ordered_json;
using namespace vtp;

std::vector<dataset::Sample> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read samples file " + path);
  return dataset::read_samples_jsonl(in);
}

dataset::SplitSamples split_samples(std::vector<dataset::Sample> samples,
                                    const std::vector<double>& ratios, std::uint64_t seed) {
  return dataset::split(std::move(samples), ratios[0], ratios[1], ratios[2], seed);
}

void write_history(const std::string& path, const std::vector<training::EpochRecord>& history) {
  std::ofstream out(path);
  for (const auto& rec : history) {
    ordered_json j;
    j["epoch"] = rec.epoch;
    j["train_ade"] = rec.train_ade;
    j["val_ade"] = rec.val_ade;
    j["wall_s"] = rec.wall_s;
    out << j.dump() << '\n';
  }
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

int run(int argc, char** argv) {
  CLI::App app{"multi-vessel trajectory prediction with attentive LSTMs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override");

  // ---- preprocess ----
  auto* pre = app.add_subcommand("preprocess", "parse, resample and filter raw AIS CSV");
  std::string pre_csv, pre_out, pre_samples;
  int pre_min_vessels = 3;
  double pre_min_sog = 1.0;
  int pre_tobs = 5, pre_tpred = 5, pre_stride = 5;
  pre->add_option("csv", pre_csv, "raw AIS CSV (marinecadastre column names)")->required();
  pre->add_option("--out", pre_out, "frames output (jsonl)")->required();
  pre->add_option("--samples", pre_samples, "also windowize into this samples file (jsonl)");
  pre->add_option("--min-vessels", pre_min_vessels, "frame survival threshold");
  pre->add_option("--min-sog", pre_min_sog, "moored-vessel cutoff, knots");
  pre->add_option("--t-obs", pre_tobs, "observation window, minutes");
  pre->add_option("--t-pred", pre_tpred, "prediction window, minutes");
  pre->add_option("--stride", pre_stride, "window stride, minutes");

  // ---- synthesize ----
  auto* syn = app.add_subcommand("synthesize", "generate synthetic traffic as AIS CSV");
  std::string syn_out;
  synthetic::ScenarioConfig scenario;
  syn->add_option("--out", syn_out, "CSV output path")->required();
  syn->add_option("--scenes", scenario.scenes, "number of scenes");
  syn->add_option("--vessels-min", scenario.n_vessels_min, "vessels per scene, lower bound");
  syn->add_option("--vessels-max", scenario.n_vessels_max, "vessels per scene, upper bound");
  syn->add_option("--speed", scenario.base_speed_kn, "base speed, knots");
  syn->add_option("--speed-jitter", scenario.speed_jitter_kn, "speed jitter, knots");
  syn->add_option("--noise", scenario.noise_std_nmi, "position noise std, nmi");
  syn->add_option("--duration", scenario.duration_min, "scene duration, minutes");
  syn->add_option("--turn-gain", scenario.turn_gain_deg_per_nmi, "avoidance gain, deg/nmi");
  syn->add_option("--turn-cap", scenario.turn_cap_deg, "avoidance cap, deg");
  syn->add_option("--seed", scenario.seed, "scenario seed");

  // ---- train ----
  auto* tr = app.add_subcommand("train", "train one model variant");
  std::string tr_data, tr_out, tr_variant = "full";
  training::TrainConfig tr_cfg;
  model::ModelConfig tr_model;
  std::vector<double> tr_ratios = {0.8, 0.1, 0.1};
  std::uint64_t tr_split_seed = 42;
  tr->add_option("--data", tr_data, "samples file (jsonl)")->required();
  tr->add_option("--out", tr_out, "checkpoint output (json)")->required();
  tr->add_option("--variant", tr_variant, "vanilla|temporal|spatial|full")
      ->check(CLI::IsMember(model::variant_names()));
  tr->add_option("--seed", tr_cfg.seed, "training seed");
  tr->add_option("--epochs", tr_cfg.epochs, "training epochs");
  tr->add_option("--batch-size", tr_cfg.batch_size, "batch size");
  tr->add_option("--lr", tr_cfg.learning_rate, "learning rate");
  tr->add_option("--grad-clip", tr_cfg.grad_clip, "global-norm gradient clip, 0 = off");
  tr->add_flag("--no-teacher-forcing", [&tr_cfg](std::int64_t) {
    tr_cfg.teacher_forcing = false;
  }, "decode from own predictions during training");
  tr->add_option("--hidden", tr_model.hidden, "hidden dimension");
  tr->add_option("--split-seed", tr_split_seed, "train/val/test shuffle seed");
  tr->add_option("--ratios", tr_ratios, "train val test ratios")->expected(3);

  // ---- evaluate ----
  auto* ev = app.add_subcommand("evaluate", "ADE/FDE of a checkpoint on samples");
  std::string ev_ckpt, ev_data, ev_out, ev_split = "all";
  std::vector<double> ev_ratios = {0.8, 0.1, 0.1};
  std::uint64_t ev_split_seed = 42;
  ev->add_option("--ckpt", ev_ckpt, "checkpoint file")->required();
  ev->add_option("--data", ev_data, "samples file (jsonl)")->required();
  ev->add_option("--out", ev_out, "report output (jsonl)");
  ev->add_option("--split", ev_split, "all|train|val|test")
      ->check(CLI::IsMember({"all", "train", "val", "test"}));
  ev->add_option("--split-seed", ev_split_seed, "shuffle seed matching training");
  ev->add_option("--ratios", ev_ratios, "train val test ratios")->expected(3);

  // ---- ablate ----
  auto* ab = app.add_subcommand("ablate", "train and compare all four variants");
  std::string ab_data, ab_out;
  std::vector<std::uint64_t> ab_seeds = {1, 2, 3};
  training::TrainConfig ab_cfg;
  model::ModelConfig ab_model;
  std::vector<double> ab_ratios = {0.8, 0.1, 0.1};
  std::uint64_t ab_split_seed = 42;
  ab->add_option("--data", ab_data, "samples file (jsonl)")->required();
  ab->add_option("--out", ab_out, "report output (jsonl)");
  ab->add_option("--seeds", ab_seeds, "training seeds")->delimiter(',');
  ab->add_option("--epochs", ab_cfg.epochs, "training epochs");
  ab->add_option("--batch-size", ab_cfg.batch_size, "batch size");
  ab->add_option("--lr", ab_cfg.learning_rate, "learning rate");
  ab->add_option("--split-seed", ab_split_seed, "train/val/test shuffle seed");
  ab->add_option("--ratios", ab_ratios, "train val test ratios")->expected(3);

  // ---- export-domain ----
  auto* ex = app.add_subcommand("export-domain", "emit the learned domain table as CSV");
  std::vector<std::string> ex_ckpts;
  std::string ex_out;
  std::int64_t ex_min_exposure = 50;
  ex->add_option("--ckpt", ex_ckpts, "checkpoint file(s); several enable seed statistics")
      ->required();
  ex->add_option("--out", ex_out, "CSV output; stdout when omitted");
  ex->add_option("--min-exposure", ex_min_exposure, "pair-observation threshold per bin");

  // ---- grad-check ----
  auto* gc = app.add_subcommand("grad-check", "tape gradients vs central finite differences");
  std::uint64_t gc_seed = 7;
  double gc_step = 1e-5, gc_tol = 1e-4;
  std::string gc_out;
  gc->add_option("--seed", gc_seed, "seed for the model and scenario");
  gc->add_option("--step", gc_step, "finite-difference step");
  gc->add_option("--tol", gc_tol, "max relative error accepted");
  gc->add_option("--out", gc_out, "report output (json)");

  CLI11_PARSE(app, argc, argv);

  if (pre->parsed()) {
    std::ifstream in(pre_csv);
    if (!in) throw SchemaError("cannot read " + pre_csv);
    const auto result = ais::run_pipeline(in, {}, pre_min_vessels, pre_min_sog);
    {
      std::ofstream out(pre_out);
      if (!out) throw SchemaError("cannot write " + pre_out);
      ais::write_frames_jsonl(out, result.frames);
    }
    ordered_json report;
    report["rows_parsed"] = result.report.rows_parsed;
    report["rows_rejected"] = result.report.rows_rejected;
    report["vessels_in"] = result.report.vessels_in;
    report["vessels_out"] = result.report.vessels_out;
    report["points_interpolated"] = result.report.points_interpolated;
    report["entries_below_sog"] = result.report.entries_below_sog;
    report["frames_assembled"] = result.report.frames_assembled;
    report["frames_dropped_small"] = result.report.frames_dropped_small;
    report["frames_out"] = result.report.frames_out;
    io::write_file(with_suffix(pre_out, ".report"), report.dump(2) + "\n");

    std::vector<std::string> outputs = {pre_out, with_suffix(pre_out, ".report")};
    if (!pre_samples.empty()) {
      dataset::WindowizeOptions opts;
      opts.t_obs = pre_tobs;
      opts.t_pred = pre_tpred;
      opts.stride = pre_stride;
      opts.min_vessels = pre_min_vessels;
      const auto windows = dataset::windowize(result.frames, opts);
      std::vector<dataset::Sample> samples;
      for (std::size_t i = 0; i < windows.size(); ++i) {
        auto s = dataset::normalize(windows[i]);
        s.id = static_cast<std::int64_t>(i);
        samples.push_back(std::move(s));
      }
      std::ofstream out(pre_samples);
      if (!out) throw SchemaError("cannot write " + pre_samples);
      dataset::write_samples_jsonl(out, samples);
      outputs.push_back(pre_samples);
      std::cout << "preprocess: " << result.frames.size() << " frames, " << samples.size()
                << " samples\n";
    } else {
      std::cout << "preprocess: " << result.frames.size() << " frames\n";
    }
    ordered_json cfg{{"min_vessels", pre_min_vessels},
                     {"min_sog", pre_min_sog},
                     {"t_obs", pre_tobs},
                     {"t_pred", pre_tpred},
                     {"stride", pre_stride}};
    const std::vector<std::string> inputs = {pre_csv};
    io::write_manifest(pre_out, "preprocess", cfg, inputs, outputs);
    return 0;
  }

  if (syn->parsed()) {
    const auto scenes = synthetic::generate(scenario);
    std::ofstream out(syn_out);
    if (!out) throw SchemaError("cannot write " + syn_out);
    synthetic::write_scenes_csv(out, scenes, scenario);
    std::cout << "synthesize: " << scenes.size() << " scenes -> " << syn_out << "\n";
    ordered_json cfg{{"scenes", scenario.scenes},
                     {"vessels_min", scenario.n_vessels_min},
                     {"vessels_max", scenario.n_vessels_max},
                     {"base_speed_kn", scenario.base_speed_kn},
                     {"speed_jitter_kn", scenario.speed_jitter_kn},
                     {"noise_std_nmi", scenario.noise_std_nmi},
                     {"duration_min", scenario.duration_min},
                     {"turn_gain_deg_per_nmi", scenario.turn_gain_deg_per_nmi},
                     {"turn_cap_deg", scenario.turn_cap_deg},
                     {"seed", scenario.seed}};
    const std::vector<std::string> outputs = {syn_out};
    io::write_manifest(syn_out, "synthesize", cfg, {}, outputs);
    return 0;
  }

  if (tr->parsed()) {
    model::apply_variant(tr_model, tr_variant);
    const auto splits = split_samples(load_samples(tr_data), tr_ratios, tr_split_seed);
    if (splits.train.empty()) throw SchemaError("train: empty training split");
    const auto result = training::train(tr_model, tr_cfg, splits.train, splits.val);

    checkpoint::Checkpoint final_ckpt{result.final_params, tr_cfg, result.exposure};
    checkpoint::save(tr_out, final_ckpt);
    checkpoint::Checkpoint best_ckpt{result.best_params, tr_cfg, result.exposure};
    const std::string best_path = with_suffix(tr_out, ".best");
    checkpoint::save(best_path, best_ckpt);
    const std::string history_path = with_suffix(tr_out, ".history");
    write_history(history_path, result.history);

    std::cout << "train: variant " << tr_variant << " seed " << tr_cfg.seed << " epochs "
              << result.history.size() << (result.diverged ? " DIVERGED" : "") << "\n";
    if (!result.history.empty()) {
      std::cout << "  final train ADE " << result.history.back().train_ade << " best val ADE "
                << result.best_val_ade << " (epoch " << result.best_epoch << ")\n";
    }
    ordered_json cfg{{"variant", tr_variant},
                     {"seed", tr_cfg.seed},
                     {"epochs", tr_cfg.epochs},
                     {"batch_size", tr_cfg.batch_size},
                     {"learning_rate", tr_cfg.learning_rate},
                     {"teacher_forcing", tr_cfg.teacher_forcing},
                     {"grad_clip", tr_cfg.grad_clip},
                     {"hidden", tr_model.hidden},
                     {"split_seed", tr_split_seed},
                     {"ratios", tr_ratios}};
    const std::vector<std::string> inputs = {tr_data};
    const std::vector<std::string> outputs = {tr_out, best_path, history_path};
    io::write_manifest(tr_out, "train", cfg, inputs, outputs);
    return result.diverged ? 1 : 0;
  }

  if (ev->parsed()) {
    auto ckpt = checkpoint::load(ev_ckpt);
    auto samples = load_samples(ev_data);
    std::vector<dataset::Sample> subset;
    if (ev_split == "all") {
      subset = std::move(samples);
    } else {
      auto splits = split_samples(std::move(samples), ev_ratios, ev_split_seed);
      subset = ev_split == "train" ? std::move(splits.train)
             : ev_split == "val"   ? std::move(splits.val)
                                   : std::move(splits.test);
    }
    const auto result = evaluation::evaluate(ckpt.params, subset);
    std::cout << "evaluate: " << result.samples << " samples, ADE " << result.ade << " nmi, FDE "
              << result.fde << " nmi\n";
    if (!ev_out.empty()) {
      std::ofstream out(ev_out);
      ordered_json head{{"samples", result.samples},
                        {"vessel_steps", result.vessel_steps},
                        {"ade", result.ade},
                        {"fde", result.fde}};
      out << head.dump() << '\n';
      for (const auto& se : result.per_sample) {
        ordered_json j{{"sample_id", se.sample_id},
                       {"n", se.n},
                       {"ade", se.ade},
                       {"fde", se.fde},
                       {"per_step_mean", se.per_step_mean}};
        out << j.dump() << '\n';
      }
      ordered_json cfg{{"split", ev_split}, {"split_seed", ev_split_seed}};
      const std::vector<std::string> inputs = {ev_ckpt, ev_data};
      const std::vector<std::string> outputs = {ev_out};
      io::write_manifest(ev_out, "evaluate", cfg, inputs, outputs);
    }
    return 0;
  }

  if (ab->parsed()) {
    const auto splits = split_samples(load_samples(ab_data), ab_ratios, ab_split_seed);
    if (splits.train.empty() || splits.test.empty()) {
      throw SchemaError("ablate: empty train or test split");
    }
    const auto report = evaluation::ablation(ab_model, ab_cfg, splits, ab_seeds, &std::cout);
    evaluation::write_ablation_table(std::cout, report);
    bool any_failed = false;
    for (const auto& r : report.runs) any_failed = any_failed || r.failed;
    if (!ab_out.empty()) {
      std::ofstream out(ab_out);
      evaluation::write_ablation_jsonl(out, report);
      ordered_json cfg{{"seeds", ab_seeds},
                       {"epochs", ab_cfg.epochs},
                       {"batch_size", ab_cfg.batch_size},
                       {"learning_rate", ab_cfg.learning_rate},
                       {"split_seed", ab_split_seed}};
      const std::vector<std::string> inputs = {ab_data};
      const std::vector<std::string> outputs = {ab_out};
      io::write_manifest(ab_out, "ablate", cfg, inputs, outputs);
    }
    return any_failed ? 1 : 0;
  }

  if (ex->parsed()) {
    std::ostringstream csv;
    if (ex_ckpts.size() == 1) {
      const auto ckpt = checkpoint::load(ex_ckpts[0]);
      const auto records = domain_export::export_domain(ckpt.params, ckpt.exposure);
      domain_export::write_domain_csv(csv, records);
    } else {
      std::vector<model::ModelParams> params;
      std::vector<std::vector<std::int64_t>> exposures;
      for (const auto& path : ex_ckpts) {
        auto ckpt = checkpoint::load(path);
        params.push_back(std::move(ckpt.params));
        exposures.push_back(std::move(ckpt.exposure));
      }
      const auto records = domain_export::seed_robustness(params, exposures, ex_min_exposure);
      domain_export::write_robustness_csv(csv, records);
    }
    if (ex_out.empty()) {
      std::cout << csv.str();
    } else {
      io::write_file(ex_out, csv.str());
      ordered_json cfg{{"min_exposure", ex_min_exposure}};
      const std::vector<std::string> outputs = {ex_out};
      io::write_manifest(ex_out, "export-domain", cfg, ex_ckpts, outputs);
    }
    return 0;
  }

  if (gc->parsed()) {
    // full model over one synthetic three-vessel encounter scene
    synthetic::ScenarioConfig sc;
    sc.scenes = 1;
    sc.n_vessels_min = 3;
    sc.n_vessels_max = 3;
    sc.seed = gc_seed;
    const auto scenes = synthetic::generate(sc);
    std::ostringstream csv;
    synthetic::write_scenes_csv(csv, scenes, sc);
    std::istringstream in(csv.str());
    const auto pipeline = ais::run_pipeline(in, {}, 3, 1.0);
    const auto windows = dataset::windowize(pipeline.frames);
    if (windows.empty()) throw NumericalError("grad-check: scenario produced no window");
    const auto sample = dataset::normalize(windows[0]);

    model::ModelConfig cfg;
    auto params = model::ModelParams::init(cfg, gc_seed);
    auto build = [&](ad::Tape& tape) {
      const auto pred = model::forward(tape, params, sample, /*teacher_forcing=*/true);
      return training::ade_loss(tape, pred, sample);
    };
    auto named = params.named_params();
    const auto report = ad::grad_check(named, build, gc_step, gc_tol);
    const bool pass = report.pass(gc_tol);
    std::cout << "grad-check: seed " << gc_seed << " step " << gc_step << "\n"
              << "  max relative error " << report.max_rel_err << " at " << report.worst_param
              << "[" << report.worst_index << "]\n"
              << "  " << report.checked << " entries checked, " << report.flagged
              << " kink-flagged\n"
              << (pass ? "  PASS" : "  FAIL") << " (tolerance " << gc_tol << ")\n";
    if (!gc_out.empty()) {
      ordered_json j{{"seed", gc_seed},
                     {"step", gc_step},
                     {"tolerance", gc_tol},
                     {"max_rel_err", report.max_rel_err},
                     {"worst_param", report.worst_param},
                     {"worst_index", report.worst_index},
                     {"checked", report.checked},
                     {"flagged", report.flagged},
                     {"pass", pass}};
      io::write_file(gc_out, j.dump(2) + "\n");
      ordered_json cfg_json{{"seed", gc_seed}, {"step", gc_step}, {"tolerance", gc_tol}};
      const std::vector<std::string> outputs = {gc_out};
      io::write_manifest(gc_out, "grad-check", cfg_json, {}, outputs);
    }
    return pass ? 0 : 1;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error&) {
    throw;  // handled by CLI11_PARSE
  } catch (const std::exception& e) {
    std::cerr << "vtp: " << e.what() << "\n";
    return 2;
  }
}
