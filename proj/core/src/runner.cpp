#include "hycore/runner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "hycore/errors.hpp"
#include "hycore/rng.hpp"
#include "hycore/shapes.hpp"
#include "hycore/triplet.hpp"

namespace hycore::run {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// rng stream ids for the independent substreams of one run
constexpr std::uint64_t kStreamInit = 11;
constexpr std::uint64_t kStreamShuffle = 12;
constexpr std::uint64_t kStreamTriplets = 13;

}  // namespace

void validate(const RunConfig& cfg) {
  if (!(cfg.curvature > 0.0))
    throw ConfigError("curvature must be positive (euclidean mode is a separate flag)");
  if (cfg.f < 1 || cfg.m < 1 || cfg.h1 < 1 || cfg.h2 < 1)
    throw ConfigError("model dimensions must be positive");
  if (cfg.weights.alpha < 0 || cfg.weights.beta < 0 || cfg.weights.gamma < 0 ||
      cfg.weights.delta < 0)
    throw ConfigError("loss weights must be nonnegative");
  if (!(cfg.optim.lr > 0.0)) throw ConfigError("lr must be positive");
  if (cfg.optim.momentum < 0.0 || cfg.optim.momentum >= 1.0)
    throw ConfigError("momentum must be in [0, 1)");
  if (cfg.optim.weight_decay < 0.0) throw ConfigError("weight_decay must be nonnegative");
  if (cfg.optim.epochs < 1) throw ConfigError("epochs must be positive");
  if (cfg.optim.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (cfg.triplet.part_min < 1 || cfg.triplet.part_min > cfg.triplet.part_max)
    throw ConfigError("part size range is invalid");
  if (cfg.triplet.whole_min < 1 || cfg.triplet.whole_min > cfg.triplet.whole_max)
    throw ConfigError("whole size range is invalid");
  if (cfg.data_dir.empty()) {
    if (cfg.dataset.per_class_train < 1 || cfg.dataset.per_class_test < 1)
      throw ConfigError("per-class counts must be positive");
    if (cfg.dataset.noise_sigma < 0.0) throw ConfigError("noise_sigma must be nonnegative");
    if (cfg.dataset.points_per_cloud < cfg.triplet.whole_min)
      throw ConfigError("points_per_cloud must be at least whole_min");
    if (cfg.dataset.points_per_cloud < cfg.triplet.part_max)
      throw ConfigError("points_per_cloud must be at least part_max");
    for (const auto& name : cfg.dataset.classes)
      data::shape_from_name(name);  // throws on unknown kinds
  }
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["data_dir"] = cfg.data_dir;
  j["dataset"] = {{"classes", cfg.dataset.classes},
                  {"per_class_train", cfg.dataset.per_class_train},
                  {"per_class_test", cfg.dataset.per_class_test},
                  {"points_per_cloud", cfg.dataset.points_per_cloud},
                  {"noise_sigma", cfg.dataset.noise_sigma},
                  {"seed", cfg.dataset.seed}};
  j["model"] = {{"curvature", cfg.curvature},
                {"euclidean_mode", cfg.euclidean_mode},
                {"f", cfg.f},
                {"m", cfg.m},
                {"h1", cfg.h1},
                {"h2", cfg.h2}};
  j["weights"] = {{"alpha", cfg.weights.alpha},
                  {"beta", cfg.weights.beta},
                  {"gamma", cfg.weights.gamma},
                  {"delta", cfg.weights.delta}};
  j["triplet"] = {{"whole_min", cfg.triplet.whole_min},
                  {"whole_max", cfg.triplet.whole_max},
                  {"part_min", cfg.triplet.part_min},
                  {"part_max", cfg.triplet.part_max}};
  j["optim"] = {{"lr", cfg.optim.lr},
                {"momentum", cfg.optim.momentum},
                {"weight_decay", cfg.optim.weight_decay},
                {"epochs", cfg.optim.epochs},
                {"batch_size", cfg.optim.batch_size}};
  j["augment_crops"] = cfg.augment_crops;
  j["out_dir"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg.data_dir = j.value("data_dir", cfg.data_dir);
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      cfg.dataset.classes = d.value("classes", cfg.dataset.classes);
      cfg.dataset.per_class_train = d.value("per_class_train", cfg.dataset.per_class_train);
      cfg.dataset.per_class_test = d.value("per_class_test", cfg.dataset.per_class_test);
      cfg.dataset.points_per_cloud = d.value("points_per_cloud", cfg.dataset.points_per_cloud);
      cfg.dataset.noise_sigma = d.value("noise_sigma", cfg.dataset.noise_sigma);
      cfg.dataset.seed = d.value("seed", cfg.dataset.seed);
    }
    if (j.contains("model")) {
      const auto& m = j["model"];
      cfg.curvature = m.value("curvature", cfg.curvature);
      cfg.euclidean_mode = m.value("euclidean_mode", cfg.euclidean_mode);
      cfg.f = m.value("f", cfg.f);
      cfg.m = m.value("m", cfg.m);
      cfg.h1 = m.value("h1", cfg.h1);
      cfg.h2 = m.value("h2", cfg.h2);
    }
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      cfg.weights.alpha = w.value("alpha", cfg.weights.alpha);
      cfg.weights.beta = w.value("beta", cfg.weights.beta);
      cfg.weights.gamma = w.value("gamma", cfg.weights.gamma);
      cfg.weights.delta = w.value("delta", cfg.weights.delta);
    }
    if (j.contains("triplet")) {
      const auto& t = j["triplet"];
      cfg.triplet.whole_min = t.value("whole_min", cfg.triplet.whole_min);
      cfg.triplet.whole_max = t.value("whole_max", cfg.triplet.whole_max);
      cfg.triplet.part_min = t.value("part_min", cfg.triplet.part_min);
      cfg.triplet.part_max = t.value("part_max", cfg.triplet.part_max);
    }
    if (j.contains("optim")) {
      const auto& o = j["optim"];
      cfg.optim.lr = o.value("lr", cfg.optim.lr);
      cfg.optim.momentum = o.value("momentum", cfg.optim.momentum);
      cfg.optim.weight_decay = o.value("weight_decay", cfg.optim.weight_decay);
      cfg.optim.epochs = o.value("epochs", cfg.optim.epochs);
      cfg.optim.batch_size = o.value("batch_size", cfg.optim.batch_size);
    }
    cfg.augment_crops = j.value("augment_crops", cfg.augment_crops);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.optim.seed = cfg.seed;
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

data::Dataset obtain_dataset(const RunConfig& cfg) {
  if (!cfg.data_dir.empty()) return data::load_dataset(cfg.data_dir);
  return data::generate_dataset(cfg.dataset);
}

// ----- accuracy --------------------------------------------------------------

namespace {

Accuracy accuracy_from_counts(const std::vector<std::size_t>& correct,
                              const std::vector<std::size_t>& total) {
  Accuracy acc;
  std::size_t all_correct = 0, all_total = 0;
  double aa_sum = 0.0;
  std::size_t aa_classes = 0;
  for (std::size_t c = 0; c < total.size(); ++c) {
    all_correct += correct[c];
    all_total += total[c];
    if (total[c] > 0) {
      aa_sum += static_cast<double>(correct[c]) / static_cast<double>(total[c]);
      ++aa_classes;
    }
  }
  acc.oa = all_total ? static_cast<double>(all_correct) / static_cast<double>(all_total) : 0.0;
  acc.aa = aa_classes ? aa_sum / static_cast<double>(aa_classes) : 0.0;
  return acc;
}

}  // namespace

Accuracy evaluate(const nn::ModelState& state, const data::Dataset& dataset,
                  const EvalMode& mode, std::uint64_t eval_seed) {
  if (dataset.num_classes() != state.num_classes)
    throw ConfigError("evaluate: checkpoint expects " + std::to_string(state.num_classes) +
                      " classes, dataset has " + std::to_string(dataset.num_classes()));
  std::vector<std::size_t> correct(dataset.num_classes(), 0);
  std::vector<std::size_t> total(dataset.num_classes(), 0);
  for (const auto& cloud : dataset.clouds) {
    int pred = -1;
    switch (mode.kind) {
      case EvalMode::Kind::kFull:
        pred = nn::predict(cloud, state);
        break;
      case EvalMode::Kind::kSubsample: {
        rng::Engine r(rng::derive(eval_seed, rng::hash_str(cloud.id)));
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(mode.count), cloud.n());
        pred = nn::predict(loss::subsample_cloud(cloud, k, r), state);
        break;
      }
      case EvalMode::Kind::kPart: {
        rng::Engine r(rng::derive(eval_seed, rng::hash_str(cloud.id)));
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(mode.count), cloud.n());
        pred = nn::predict(loss::knn_part(cloud, k, r), state);
        break;
      }
    }
    const auto label = static_cast<std::size_t>(cloud.label);
    ++total[label];
    if (pred == cloud.label) ++correct[label];
  }
  return accuracy_from_counts(correct, total);
}

std::vector<EvalMode> parse_eval_modes(const std::string& text) {
  if (text == "full") return {EvalMode{EvalMode::Kind::kFull, 0}};
  EvalMode::Kind kind;
  std::string rest;
  if (text.rfind("subsample:", 0) == 0) {
    kind = EvalMode::Kind::kSubsample;
    rest = text.substr(10);
  } else if (text.rfind("part:", 0) == 0) {
    kind = EvalMode::Kind::kPart;
    rest = text.substr(5);
  } else {
    throw ConfigError("eval mode must be full, subsample:K or part:N, got: " + text);
  }
  std::vector<EvalMode> modes;
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    try {
      v = std::stoi(item);
    } catch (const std::exception&) {
      throw ConfigError("eval mode: bad count '" + item + "'");
    }
    if (v < 1) throw ConfigError("eval mode: count must be positive");
    modes.push_back(EvalMode{kind, v});
  }
  if (modes.empty()) throw ConfigError("eval mode: no counts given");
  return modes;
}

std::vector<EvalRow> cmd_eval(const nn::ModelState& state, const data::Dataset& dataset,
                              const std::vector<EvalMode>& modes, std::uint64_t eval_seed) {
  std::vector<EvalRow> rows;
  for (const auto& mode : modes) {
    const Accuracy acc = evaluate(state, dataset, mode, eval_seed);
    EvalRow row;
    switch (mode.kind) {
      case EvalMode::Kind::kFull: row.mode = "full"; break;
      case EvalMode::Kind::kSubsample: row.mode = "subsample"; break;
      case EvalMode::Kind::kPart: row.mode = "part"; break;
    }
    row.count = mode.count;
    row.oa = acc.oa;
    row.aa = acc.aa;
    rows.push_back(row);
  }
  return rows;
}

// ----- training --------------------------------------------------------------

namespace {

fs::path resolve_run_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  const char* env_root = std::getenv(kOutRootEnv);
  const fs::path root = env_root && *env_root ? fs::path(env_root) : fs::path("runs");
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_buf{};
  localtime_r(&now, &tm_buf);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%d_%H%M%S", &tm_buf);
  fs::path dir = root / (std::string("run_") + stamp + "_seed" + std::to_string(cfg.seed));
  int suffix = 1;
  fs::path candidate = dir;
  while (fs::exists(candidate)) candidate = dir.string() + "_" + std::to_string(suffix++);
  return candidate;
}

void write_manifest(const fs::path& run_dir, const RunConfig& cfg) {
  std::ofstream out(run_dir / "manifest.txt");
  out << "tool: hycore " << kVersion << "\n";
  out << "command: train\n";
  out << "seed: " << cfg.seed << "\n";
  out << "config: config.json (complete snapshot; identical runs are bit-identical)\n";
  if (cfg.data_dir.empty()) {
    out << "data: generated in-process from dataset spec (seed "
        << cfg.dataset.seed << ")\n";
  } else {
    out << "data: loaded from " << cfg.data_dir << "\n";
  }
  out << "rerun: hycore train --config " << (run_dir / "config.json").string()
      << " --out <fresh-dir>\n";
  out << "artifacts: metrics.csv checkpoint_best.ckpt checkpoint_last.ckpt\n";
}

}  // namespace

TrainResult train_with_data(const RunConfig& cfg, const data::Dataset& train_set,
                            const data::Dataset& test_set, std::ostream* log) {
  validate(cfg);
  if (train_set.num_classes() < 2) throw DataError("train: need at least 2 classes");
  if (train_set.size() == 0) throw DataError("train: empty training set");

  TrainResult result;
  result.run_dir = resolve_run_dir(cfg);
  fs::create_directories(result.run_dir);
  {
    std::ofstream out(result.run_dir / "config.json");
    if (!out) throw ConfigError("train: cannot write into " + result.run_dir.string());
    out << config_to_json(cfg);
  }
  result.metrics_path = result.run_dir / "metrics.csv";
  result.best_checkpoint = result.run_dir / "checkpoint_best.ckpt";
  result.last_checkpoint = result.run_dir / "checkpoint_last.ckpt";

  nn::ModelDims dims;
  dims.h1 = static_cast<std::size_t>(cfg.h1);
  dims.h2 = static_cast<std::size_t>(cfg.h2);
  dims.m = static_cast<std::size_t>(cfg.m);
  dims.f = static_cast<std::size_t>(cfg.f);
  dims.num_classes = train_set.num_classes();
  const geo::Curvature curv{cfg.curvature, cfg.euclidean_mode};
  nn::ModelState state = nn::init_model(dims, curv, rng::derive(cfg.seed, kStreamInit));
  optim::Optimizer optimizer(cfg.optim);

  rng::Engine shuffle_rng(rng::derive(cfg.seed, kStreamShuffle));
  rng::Engine triplet_rng(rng::derive(cfg.seed, kStreamTriplets));

  std::ofstream metrics(result.metrics_path);
  if (!metrics) throw ConfigError("train: cannot write metrics.csv");
  metrics << "epoch,lr,ce,r_hier,r_contr,total,train_oa,train_aa,test_oa,test_aa\n";

  std::vector<std::size_t> indices(train_set.size());
  std::iota(indices.begin(), indices.end(), 0);
  const EvalMode full_mode{EvalMode::Kind::kFull, 0};

  for (int epoch = 0; epoch < cfg.optim.epochs; ++epoch) {
    const double lr_now = optim::Optimizer::cosine_lr(cfg.optim, epoch);
    rng::shuffle(indices, shuffle_rng);

    loss::BatchTerms sums;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < indices.size();
         start += static_cast<std::size_t>(cfg.optim.batch_size)) {
      const std::size_t stop =
          std::min(indices.size(), start + static_cast<std::size_t>(cfg.optim.batch_size));
      const std::vector<std::size_t> anchors(indices.begin() + static_cast<std::ptrdiff_t>(start),
                                             indices.begin() + static_cast<std::ptrdiff_t>(stop));
      loss::TripletBatch batch =
          loss::build_triplets(train_set, anchors, triplet_rng, cfg.triplet);
      loss::BatchResult res =
          loss::evaluate_batch(batch, state, cfg.weights, true, cfg.augment_crops);
      if (!std::isfinite(res.terms.total))
        throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch));
      const optim::StepLog step_log =
          optimizer.step_all(state, std::move(res.grads), lr_now);
      result.skipped_updates += step_log.skipped.size();

      const auto bsz = static_cast<double>(batch.size());
      sums.ce += res.terms.ce * bsz;
      sums.r_hier += res.terms.r_hier * bsz;
      sums.r_contr += res.terms.r_contr * bsz;
      sums.total += res.terms.total * bsz;
      seen += batch.size();
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr_now;
    const double inv = seen ? 1.0 / static_cast<double>(seen) : 0.0;
    rec.ce = sums.ce * inv;
    rec.r_hier = sums.r_hier * inv;
    rec.r_contr = sums.r_contr * inv;
    rec.total = sums.total * inv;
    const Accuracy train_acc = evaluate(state, train_set, full_mode, 0);
    const Accuracy test_acc = evaluate(state, test_set, full_mode, 0);
    rec.train_oa = train_acc.oa;
    rec.train_aa = train_acc.aa;
    rec.test_oa = test_acc.oa;
    rec.test_aa = test_acc.aa;
    result.history.push_back(rec);

    metrics << rec.epoch << ',' << fmt17(rec.lr) << ',' << fmt17(rec.ce) << ','
            << fmt17(rec.r_hier) << ',' << fmt17(rec.r_contr) << ',' << fmt17(rec.total)
            << ',' << fmt17(rec.train_oa) << ',' << fmt17(rec.train_aa) << ','
            << fmt17(rec.test_oa) << ',' << fmt17(rec.test_aa) << '\n';
    metrics.flush();

    if (result.best_epoch < 0 || rec.test_oa > result.best_test_oa) {
      result.best_epoch = epoch;
      result.best_test_oa = rec.test_oa;
      nn::save_checkpoint(result.best_checkpoint, state, {epoch});
    }
    if (log) {
      *log << "epoch " << epoch << " lr " << lr_now << " total " << rec.total << " ce "
           << rec.ce << " train_oa " << rec.train_oa << " test_oa " << rec.test_oa
           << "\n";
      log->flush();
    }
  }

  nn::save_checkpoint(result.last_checkpoint, state, {cfg.optim.epochs - 1});
  write_manifest(result.run_dir, cfg);
  return result;
}

TrainResult cmd_train(const RunConfig& cfg, std::ostream* log) {
  validate(cfg);
  const data::Dataset all = obtain_dataset(cfg);
  auto [train_set, test_set] = data::split(all, cfg.dataset);
  return train_with_data(cfg, train_set, test_set, log);
}

// ----- embedding export ------------------------------------------------------

void cmd_embed(const nn::ModelState& state, const data::Dataset& dataset,
               const fs::path& out_csv, const EmbedOptions& options) {
  if (dataset.num_classes() != state.num_classes)
    throw ConfigError("embed: checkpoint class count does not match dataset");
  std::ofstream out(out_csv);
  if (!out) throw DataError("embed: cannot write " + out_csv.string());
  out << "id,label,is_part,n_prime,hnorm";
  for (std::size_t i = 0; i < state.f; ++i) out << ",c" << i;
  out << "\n";

  auto write_row = [&](const std::string& id, int label, bool is_part, std::size_t n_prime,
                       const geo::PoincarePoint& z) {
    out << id << ',' << label << ',' << (is_part ? 1 : 0) << ',' << n_prime << ','
        << fmt17(geo::hnorm(z));
    for (double c : z.coords) out << ',' << fmt17(c);
    out << '\n';
  };

  for (const auto& cloud : dataset.clouds) {
    write_row(cloud.id, cloud.label, false, cloud.n(), nn::embed(cloud, state));
    rng::Engine r(rng::derive(options.seed, rng::hash_str(cloud.id)));
    std::vector<int> sizes = options.part_sizes;
    if (sizes.empty()) {
      sizes.resize(static_cast<std::size_t>(std::max(0, options.parts_per_object)));
      for (auto& s : sizes)
        s = static_cast<int>(r.uniform_int(options.part_min, options.part_max));
    }
    for (int s : sizes) {
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, s)), cloud.n());
      const data::PointCloud part = loss::knn_part(cloud, k, r);
      write_row(cloud.id, cloud.label, true, k, nn::embed(part, state));
    }
  }
  if (!out) throw DataError("embed: write failed for " + out_csv.string());

  if (!options.pairwise_ids.empty()) {
    std::vector<geo::PoincarePoint> points;
    for (const auto& id : options.pairwise_ids) {
      auto it = std::find_if(dataset.clouds.begin(), dataset.clouds.end(),
                             [&](const data::PointCloud& c) { return c.id == id; });
      if (it == dataset.clouds.end()) throw DataError("embed: unknown id " + id);
      points.push_back(nn::embed(*it, state));
    }
    fs::path dist_path = out_csv;
    dist_path += ".dist.csv";
    std::ofstream dout(dist_path);
    if (!dout) throw DataError("embed: cannot write " + dist_path.string());
    dout << "id";
    for (const auto& id : options.pairwise_ids) dout << ',' << id;
    dout << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
      dout << options.pairwise_ids[i];
      for (std::size_t j = 0; j < points.size(); ++j)
        dout << ',' << fmt17(geo::dist(points[i], points[j]));
      dout << '\n';
    }
  }
}

// ----- sweeps ----------------------------------------------------------------

namespace {

struct SweepCell {
  std::string axis_value;
  std::string variant;
  RunConfig cfg;
};

RunConfig with_variant(RunConfig cfg, const std::string& variant) {
  if (variant == "baseline" || variant == "hype" || variant == "ce-only") {
    cfg.weights.alpha = 0.0;
    cfg.weights.beta = 0.0;
  } else if (variant == "r-hier") {
    cfg.weights.alpha = 0.0;
  } else if (variant == "r-contr") {
    cfg.weights.beta = 0.0;
  }
  cfg.euclidean_mode = variant == "baseline" || variant == "eucore";
  return cfg;
}

}  // namespace

std::vector<SweepRow> cmd_sweep(const RunConfig& base, const std::string& axis,
                                const std::vector<std::uint64_t>& seeds,
                                std::ostream& out) {
  validate(base);
  if (seeds.empty()) throw ConfigError("sweep: need at least one seed");

  std::vector<SweepCell> cells;
  if (axis == "dim") {
    for (int f : {16, 64, 256}) {
      for (const std::string variant : {"baseline", "eucore", "hype", "hycore"}) {
        RunConfig cfg = with_variant(base, variant);
        cfg.f = f;
        cells.push_back({std::to_string(f), variant, cfg});
      }
    }
  } else if (axis == "curvature") {
    for (double c : {1.0, 0.5, 0.1, 0.01}) {
      for (const std::string variant : {"hype", "hycore"}) {
        RunConfig cfg = with_variant(base, variant);
        cfg.curvature = c;
        cells.push_back({fmt17(c), variant, cfg});
      }
    }
  } else if (axis == "ablation") {
    for (const std::string variant : {"ce-only", "r-hier", "r-contr", "full"}) {
      RunConfig cfg = with_variant(base, variant);
      cells.push_back({variant, variant, cfg});
    }
  } else {
    throw ConfigError("sweep: axis must be dim, curvature or ablation");
  }

  const data::Dataset all = obtain_dataset(base);
  auto [train_set, test_set] = data::split(all, base.dataset);
  const fs::path sweep_root = base.out_dir.empty()
                                  ? resolve_run_dir(base)
                                  : fs::path(base.out_dir);

  std::vector<SweepRow> rows;
  for (const auto& cell : cells) {
    double oa_sum = 0.0, aa_sum = 0.0;
    for (const auto seed : seeds) {
      RunConfig cfg = cell.cfg;
      cfg.seed = seed;
      cfg.optim.seed = seed;
      cfg.out_dir = (sweep_root / (axis + "_" + cell.axis_value + "_" + cell.variant) /
                     ("seed" + std::to_string(seed)))
                        .string();
      const TrainResult res = train_with_data(cfg, train_set, test_set);
      const auto& best = res.history.at(static_cast<std::size_t>(res.best_epoch));
      oa_sum += best.test_oa;
      aa_sum += best.test_aa;
    }
    SweepRow row;
    row.axis_value = cell.axis_value;
    row.variant = cell.variant;
    row.mean_test_oa = oa_sum / static_cast<double>(seeds.size());
    row.mean_test_aa = aa_sum / static_cast<double>(seeds.size());
    rows.push_back(row);
    out << axis << "=" << row.axis_value << "  " << row.variant << "  OA "
        << row.mean_test_oa << "  AA " << row.mean_test_aa << "\n";
    out.flush();
  }

  std::ofstream csv(sweep_root / "sweep_results.csv");
  csv << "axis,axis_value,variant,mean_test_oa,mean_test_aa\n";
  for (const auto& row : rows)
    csv << axis << ',' << row.axis_value << ',' << row.variant << ','
        << fmt17(row.mean_test_oa) << ',' << fmt17(row.mean_test_aa) << '\n';
  return rows;
}

}  // namespace hycore::run
