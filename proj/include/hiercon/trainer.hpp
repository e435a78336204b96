#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hiercon/config.hpp"
#include "hiercon/corpus.hpp"
#include "hiercon/encoder.hpp"
#include "hiercon/evaluation.hpp"
#include "hiercon/losses.hpp"
#include "hiercon/optim.hpp"

namespace hiercon {

class TrainingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Linear softmax classifier over encoder vectors.
struct ClassifierHead {
  Level level = Level::l1;
  MatrixXd weight;  // classes x d
  MatrixXd bias;    // classes x 1
  MatrixXd weight_grad;
  MatrixXd bias_grad;

  ClassifierHead() = default;
  ClassifierHead(Level level, Eigen::Index classes, Eigen::Index d, std::mt19937_64& rng);

  Eigen::Index classes() const { return weight.rows(); }
  MatrixXd logits(const MatrixXd& vectors) const;
  /// Accumulates head gradients and returns d(loss)/d(vectors).
  MatrixXd backward(const MatrixXd& vectors, const MatrixXd& dlogits);
};

/// Shared encoder feeding a level-1 and a level-2 head.
class Model {
public:
  Model(const TrainConfig& cfg, const SenseHierarchy& h);

  Encoder& encoder() { return *encoder_; }
  const Encoder& encoder() const { return *encoder_; }
  ClassifierHead& head(Level l) { return l == Level::l1 ? head_l1_ : head_l2_; }
  const ClassifierHead& head(Level l) const { return l == Level::l1 ? head_l1_ : head_l2_; }

  std::vector<Parameter> parameters();
  void zero_grad();

  /// Copies of every parameter value, keyed by name.
  std::map<std::string, MatrixXd> snapshot();
  /// Throws ValidationError when names or shapes do not match.
  void restore(const std::map<std::string, MatrixXd>& values);

private:
  std::unique_ptr<Encoder> encoder_;
  ClassifierHead head_l1_, head_l2_;
};

/// Class indices of the first sense; kIgnoreClass where the sense falls
/// outside the level's allow-list.
std::vector<int> gold_indices(std::span<const RelationExample> batch, Level level,
                              const SenseHierarchy& h);

struct StepStats {
  LossBreakdown loss;
  double grad_norm = 0.0;
  double grad_norm_clipped = 0.0;
};

struct Evaluation {
  EvalReport l1;
  EvalReport l2;
  Predictions preds_l1;
  Predictions preds_l2;
  double loss = 0.0;
};

/// Argmax predictions of both heads, scored match-any-gold.
Evaluation evaluate(const Model& model, const std::vector<RelationExample>& examples,
                    const SenseHierarchy& h);

struct MetricRecord {
  int epoch = 0;
  std::string split;
  std::string metric;
  double value = 0.0;
};

void write_history(std::ostream& out, const std::vector<MetricRecord>& history);
std::vector<MetricRecord> read_history(std::istream& in);

struct Checkpoint {
  TrainConfig config;
  HierarchyVersion version = HierarchyVersion::pdtb3;
  int epoch = 0;
  std::map<std::string, double> dev_metrics;
  std::map<std::string, MatrixXd> parameters;
};

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& in);
/// Rebuilds the model a checkpoint was taken from.
std::unique_ptr<Model> model_from_checkpoint(const Checkpoint& ckpt, const SenseHierarchy& h);

struct TrainResult {
  Checkpoint best;
  std::vector<MetricRecord> history;
  std::vector<StepStats> steps;
  int epochs_run = 0;
  int best_epoch = 0;
};

/// Owns the model and optimizer for one training run.
class Trainer {
public:
  Trainer(const TrainConfig& cfg, const SenseHierarchy& h);

  /// One optimizer update on `batch`. Throws TrainingError on a non-finite
  /// loss, naming the batch's rel_ids.
  StepStats step(std::span<const RelationExample> batch);

  /// Expands, augments and trains with early stopping on dev level-2
  /// macro-F1; returns the best-dev checkpoint.
  TrainResult fit(const SplitSet& splits);

  Model& model() { return model_; }
  const TrainConfig& config() const { return cfg_; }

private:
  TrainConfig cfg_;
  const SenseHierarchy& h_;
  Model model_;
  Adam adam_;
  std::mt19937_64 rng_;
};

/// Training pool: multi-label expansion, then augmentation when enabled.
std::vector<RelationExample> training_pool(const std::vector<RelationExample>& train,
                                           bool augmentation);

TrainResult train(const TrainConfig& cfg, const SplitSet& splits, const SenseHierarchy& h);

struct SweepRow {
  double beta = 0.0;
  int seeds = 0;
  double dev_accuracy_l1 = 0.0;
  double dev_macro_f1_l1 = 0.0;
  double dev_accuracy_l2 = 0.0;
  double dev_macro_f1_l2 = 0.0;
};

/// One run per (beta, seed); rows hold the mean over seeds of best-dev metrics.
std::vector<SweepRow> sweep_beta(const TrainConfig& cfg, const SplitSet& splits,
                                 const SenseHierarchy& h, const std::vector<double>& grid,
                                 const std::vector<std::uint64_t>& seeds = {});

/// 0, 0.2, ..., 2.4.
std::vector<double> default_beta_grid();

} // namespace hiercon
