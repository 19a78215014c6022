#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hycore/checkpoint.hpp"
#include "hycore/dataset.hpp"
#include "hycore/loss.hpp"
#include "hycore/model.hpp"
#include "hycore/optimizer.hpp"

namespace hycore::run {

inline constexpr const char* kVersion = "0.1.0";
/// Runs land under this root when no output directory is given.
inline constexpr const char* kOutRootEnv = "HYCORE_OUT_ROOT";

struct RunConfig {
  std::string data_dir;        // empty: generate from `dataset`
  data::DatasetSpec dataset;   // classes empty selects all eight shapes

  double curvature = 1.0;
  bool euclidean_mode = false;
  int f = 16;
  int m = 32;
  int h1 = 32;
  int h2 = 32;

  loss::LossWeights weights;
  loss::TripletConfig triplet;
  optim::OptimConfig optim;
  bool augment_crops = false;  // extra CE on positive crops (no regularizers needed)

  std::string out_dir;
  std::uint64_t seed = 1;
};

/// Throws ConfigError on any invalid field.
void validate(const RunConfig& cfg);

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// The dataset the config describes (loaded or generated), not yet split.
data::Dataset obtain_dataset(const RunConfig& cfg);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double ce = 0.0;
  double r_hier = 0.0;
  double r_contr = 0.0;
  double total = 0.0;
  double train_oa = 0.0, train_aa = 0.0;
  double test_oa = 0.0, test_aa = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  double best_test_oa = 0.0;
  std::filesystem::path run_dir;
  std::filesystem::path metrics_path;
  std::filesystem::path best_checkpoint;
  std::filesystem::path last_checkpoint;
  std::size_t skipped_updates = 0;  // non-finite gradients dropped by the optimizer
};

/// Full training command: resolves the dataset, trains cfg.optim.epochs
/// epochs, writes config.json, metrics.csv, checkpoint_best.ckpt (by test
/// OA), checkpoint_last.ckpt and manifest.txt into the run directory.
TrainResult cmd_train(const RunConfig& cfg, std::ostream* log = nullptr);

/// Same loop on an already-split dataset (used by sweeps and tests to avoid
/// regenerating data).
TrainResult train_with_data(const RunConfig& cfg, const data::Dataset& train_set,
                            const data::Dataset& test_set, std::ostream* log = nullptr);

// ----- evaluation ------------------------------------------------------------

struct EvalMode {
  enum class Kind { kFull, kSubsample, kPart };
  Kind kind = Kind::kFull;
  int count = 0;  // points kept (subsample) or part size (part)
};

/// "full", "subsample:K" or "part:N"; K/N may be comma lists, producing one
/// mode per value.
std::vector<EvalMode> parse_eval_modes(const std::string& text);

struct Accuracy {
  double oa = 0.0;
  double aa = 0.0;
};

/// Deterministic: per-cloud substreams are derived from eval_seed and the
/// cloud id, so results are independent of evaluation order.
Accuracy evaluate(const nn::ModelState& state, const data::Dataset& dataset,
                  const EvalMode& mode, std::uint64_t eval_seed);

struct EvalRow {
  std::string mode;
  int count = 0;
  double oa = 0.0;
  double aa = 0.0;
};

std::vector<EvalRow> cmd_eval(const nn::ModelState& state, const data::Dataset& dataset,
                              const std::vector<EvalMode>& modes, std::uint64_t eval_seed);

// ----- embedding export ------------------------------------------------------

struct EmbedOptions {
  std::vector<int> part_sizes;  // one part per listed size per object
  int parts_per_object = 2;     // used when part_sizes is empty
  int part_min = 200;
  int part_max = 600;
  std::vector<std::string> pairwise_ids;  // also dump their distance matrix
  std::uint64_t seed = 123;
};

/// Writes one CSV row per object and per sampled part: id, label, is_part,
/// n_prime, hnorm, then the f ball coordinates. With pairwise_ids set, a
/// matrix of geodesic distances between those objects' embeddings lands next
/// to the main file with a ".dist.csv" suffix.
void cmd_embed(const nn::ModelState& state, const data::Dataset& dataset,
               const std::filesystem::path& out_csv, const EmbedOptions& options);

// ----- sweeps ----------------------------------------------------------------

struct SweepRow {
  std::string axis_value;
  std::string variant;
  double mean_test_oa = 0.0;
  double mean_test_aa = 0.0;
};

/// axis is one of "dim" (f in {16,64,256}), "curvature" (c in
/// {1,0.5,0.1,0.01}) or "ablation" (ce-only / r-hier / r-contr / full).
/// Every cell trains with the same seed list; rows report seed means.
std::vector<SweepRow> cmd_sweep(const RunConfig& base, const std::string& axis,
                                const std::vector<std::uint64_t>& seeds,
                                std::ostream& out);

}  // namespace hycore::run
