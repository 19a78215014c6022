// hycore command line: train / eval / embed / sweep for the hyperbolic
// compositional point-cloud classifier.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hycore/checkpoint.hpp"
#include "hycore/errors.hpp"
#include "hycore/runner.hpp"

namespace fs = std::filesystem;
using namespace hycore;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct DataSelection {
  std::string run_dir;
  std::string data_dir;
  std::string split = "test";
};

// Resolves the dataset for eval/embed. A run directory rebuilds the exact
// train/test split from its config snapshot; a bare data directory is used
// whole.
data::Dataset resolve_dataset(const DataSelection& sel) {
  if (!sel.run_dir.empty()) {
    run::RunConfig cfg = run::load_config(fs::path(sel.run_dir) / "config.json");
    data::Dataset all = run::obtain_dataset(cfg);
    if (sel.split == "all") return all;
    auto [train_set, test_set] = data::split(all, cfg.dataset);
    if (sel.split == "train") return train_set;
    if (sel.split == "test") return test_set;
    throw ConfigError("--split must be train, test or all");
  }
  if (sel.data_dir.empty())
    throw ConfigError("need --run-dir or --data-dir");
  if (sel.split != "all" && sel.split != "test")
    throw ConfigError("--split train/test requires --run-dir (a bare --data-dir has no split)");
  return data::load_dataset(sel.data_dir);
}

fs::path resolve_checkpoint(const std::string& checkpoint, const std::string& run_dir) {
  if (!checkpoint.empty()) return checkpoint;
  if (!run_dir.empty()) return fs::path(run_dir) / "checkpoint_best.ckpt";
  throw ConfigError("need --checkpoint or --run-dir");
}

void add_train_options(CLI::App* cmd, run::RunConfig& cfg) {
  cmd->add_option("--data-dir", cfg.data_dir, "Load dataset from a directory instead of generating");
  cmd->add_option("--classes", cfg.dataset.classes, "Generator classes (default: all eight)")
      ->delimiter(',');
  cmd->add_option("--per-class-train", cfg.dataset.per_class_train, "Training clouds per class");
  cmd->add_option("--per-class-test", cfg.dataset.per_class_test, "Test clouds per class");
  cmd->add_option("--points", cfg.dataset.points_per_cloud, "Points per generated cloud");
  cmd->add_option("--noise-sigma", cfg.dataset.noise_sigma, "Surface jitter sigma");
  cmd->add_option("--data-seed", cfg.dataset.seed, "Dataset generation/split seed");

  cmd->add_option("--curvature,-c", cfg.curvature, "Curvature magnitude c");
  cmd->add_flag("--euclidean-mode", cfg.euclidean_mode, "Flat-space ablation");
  cmd->add_option("--f", cfg.f, "Ball embedding dimension");
  cmd->add_option("--m", cfg.m, "Encoder feature width");
  cmd->add_option("--h1", cfg.h1, "Encoder hidden width 1");
  cmd->add_option("--h2", cfg.h2, "Encoder hidden width 2");

  cmd->add_option("--alpha", cfg.weights.alpha, "Contrastive weight");
  cmd->add_option("--beta", cfg.weights.beta, "Hierarchy weight");
  cmd->add_option("--gamma", cfg.weights.gamma, "Hierarchy margin scale (gamma/N')");
  cmd->add_option("--delta", cfg.weights.delta, "Contrastive margin");

  cmd->add_option("--whole-min", cfg.triplet.whole_min, "Whole subsample lower bound");
  cmd->add_option("--whole-max", cfg.triplet.whole_max, "Whole subsample upper bound");
  cmd->add_option("--part-min", cfg.triplet.part_min, "Part size lower bound");
  cmd->add_option("--part-max", cfg.triplet.part_max, "Part size upper bound");

  cmd->add_option("--lr", cfg.optim.lr, "Initial learning rate (cosine decay)");
  cmd->add_option("--momentum", cfg.optim.momentum, "Momentum (Euclidean group)");
  cmd->add_option("--weight-decay", cfg.optim.weight_decay, "Weight decay (Euclidean group)");
  cmd->add_option("--epochs", cfg.optim.epochs, "Training epochs");
  cmd->add_option("--batch-size", cfg.optim.batch_size, "Batch size");

  cmd->add_flag("--augment-crops", cfg.augment_crops, "Add CE on random crops (baseline augmentation)");
  cmd->add_option("--out,-o", cfg.out_dir, "Run directory (default under $HYCORE_OUT_ROOT)");
  cmd->add_option("--seed,-s", cfg.seed, "Run seed");
}

std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc - 1; ++i)
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperbolic compositional regularization for point clouds"};
  app.set_version_flag("--version", std::string("hycore ") + run::kVersion);
  app.require_subcommand(1);

  int exit_code = kExitOk;

  try {
    run::RunConfig cfg;
    const std::string config_path = find_config_arg(argc, argv);
    if (!config_path.empty()) cfg = run::load_config(config_path);
    cfg.optim.seed = cfg.seed;
    std::string config_sink;

    // ---- train ----
    auto* train = app.add_subcommand("train", "Train a model and write a run directory");
    train->add_option("--config", config_sink, "JSON config to start from (flags override)");
    bool quiet = false;
    train->add_flag("--quiet", quiet, "Suppress per-epoch progress on stderr");
    add_train_options(train, cfg);
    train->callback([&]() {
      cfg.optim.seed = cfg.seed;
      run::TrainResult res = run::cmd_train(cfg, quiet ? nullptr : &std::cerr);
      std::cout << "run_dir: " << res.run_dir.string() << "\n";
      std::cout << "best_epoch: " << res.best_epoch << "\n";
      std::cout << "best_test_oa: " << res.best_test_oa << "\n";
      if (res.skipped_updates > 0)
        std::cerr << "warning: " << res.skipped_updates
                  << " parameter updates skipped on non-finite gradients\n";
    });

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint (full / subsample:K / part:N)");
    DataSelection eval_sel;
    std::string eval_checkpoint, eval_mode = "full", eval_out;
    std::uint64_t eval_seed = 1;
    eval->add_option("--checkpoint", eval_checkpoint, "Checkpoint path");
    eval->add_option("--run-dir", eval_sel.run_dir, "Run directory (uses its config + best checkpoint)");
    eval->add_option("--data-dir", eval_sel.data_dir, "Dataset directory (evaluated whole)");
    eval->add_option("--split", eval_sel.split, "train | test | all (with --run-dir; default test)");
    eval->add_option("--mode", eval_mode, "full, subsample:K or part:N; K/N may be comma lists");
    eval->add_option("--eval-seed", eval_seed, "Seed for subsample/part draws");
    eval->add_option("--out", eval_out, "Optional CSV for the result table");
    eval->callback([&]() {
      const nn::Checkpoint ck = nn::load_checkpoint(
          resolve_checkpoint(eval_checkpoint, eval_sel.run_dir));
      const data::Dataset ds = resolve_dataset(eval_sel);
      const auto rows = run::cmd_eval(ck.state, ds, run::parse_eval_modes(eval_mode), eval_seed);
      std::printf("%-10s %8s %8s %8s\n", "mode", "count", "OA", "AA");
      for (const auto& r : rows)
        std::printf("%-10s %8d %8.4f %8.4f\n", r.mode.c_str(), r.count, r.oa, r.aa);
      if (!eval_out.empty()) {
        std::ofstream out(eval_out);
        if (!out) throw DataError("eval: cannot write " + eval_out);
        out << "mode,count,oa,aa\n";
        for (const auto& r : rows)
          out << r.mode << ',' << r.count << ',' << r.oa << ',' << r.aa << '\n';
      }
    });

    // ---- embed ----
    auto* embed = app.add_subcommand("embed", "Export ball coordinates and hyperbolic norms");
    DataSelection embed_sel;
    std::string embed_checkpoint, embed_out = "embeddings.csv";
    run::EmbedOptions embed_opts;
    embed->add_option("--checkpoint", embed_checkpoint, "Checkpoint path");
    embed->add_option("--run-dir", embed_sel.run_dir, "Run directory");
    embed->add_option("--data-dir", embed_sel.data_dir, "Dataset directory");
    embed->add_option("--split", embed_sel.split, "train | test | all (default test)");
    embed->add_option("--out", embed_out, "Output CSV path");
    embed->add_option("--parts-per-object", embed_opts.parts_per_object,
                      "Random parts sampled per object");
    embed->add_option("--part-sizes", embed_opts.part_sizes,
                      "Explicit part sizes per object (overrides --parts-per-object)")
        ->delimiter(',');
    embed->add_option("--part-min", embed_opts.part_min, "Random part size lower bound");
    embed->add_option("--part-max", embed_opts.part_max, "Random part size upper bound");
    embed->add_option("--pairwise", embed_opts.pairwise_ids,
                      "Also dump a geodesic distance matrix for these ids")
        ->delimiter(',');
    embed->add_option("--embed-seed", embed_opts.seed, "Seed for part draws");
    embed->callback([&]() {
      const nn::Checkpoint ck = nn::load_checkpoint(
          resolve_checkpoint(embed_checkpoint, embed_sel.run_dir));
      const data::Dataset ds = resolve_dataset(embed_sel);
      run::cmd_embed(ck.state, ds, embed_out, embed_opts);
      std::cout << "wrote " << embed_out << "\n";
    });

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "Train a comparison grid (dim / curvature / ablation)");
    sweep->add_option("--config", config_sink, "JSON config to start from (flags override)");
    std::string sweep_axis;
    std::vector<std::uint64_t> sweep_seeds;
    sweep->add_option("--axis", sweep_axis, "dim | curvature | ablation")->required();
    sweep->add_option("--seeds", sweep_seeds, "Seed list shared across the grid")->delimiter(',');
    add_train_options(sweep, cfg);
    sweep->callback([&]() {
      cfg.optim.seed = cfg.seed;
      if (sweep_seeds.empty()) sweep_seeds = {cfg.seed};
      run::cmd_sweep(cfg, sweep_axis, sweep_seeds, std::cout);
    });

    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    exit_code = kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    exit_code = kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    exit_code = kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    exit_code = kExitError;
  }
  return exit_code;
}
