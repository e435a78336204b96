#include "hiercon/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hiercon/augmentation.hpp"
#include "hiercon/error.hpp"
#include "hiercon/pairing.hpp"

namespace hiercon {

using nlohmann::json;

namespace {

constexpr Eigen::Index kEvalChunk = 256;

MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

std::size_t argmax_row(const MatrixXd& m, Eigen::Index row) {
  Eigen::Index best = 0;
  m.row(row).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

bool all_finite(const LossBreakdown& b) {
  return std::isfinite(b.ce_l1) && std::isfinite(b.ce_l2) && std::isfinite(b.scl) &&
         std::isfinite(b.total);
}

} // namespace

ClassifierHead::ClassifierHead(Level lvl, Eigen::Index classes, Eigen::Index d,
                               std::mt19937_64& rng)
    : level(lvl),
      weight(gaussian(classes, d, 1.0 / std::sqrt(static_cast<double>(d)), rng)),
      bias(MatrixXd::Zero(classes, 1)),
      weight_grad(MatrixXd::Zero(classes, d)),
      bias_grad(MatrixXd::Zero(classes, 1)) {}

MatrixXd ClassifierHead::logits(const MatrixXd& vectors) const {
  MatrixXd out = vectors * weight.transpose();
  out.rowwise() += bias.col(0).transpose();
  return out;
}

MatrixXd ClassifierHead::backward(const MatrixXd& vectors, const MatrixXd& dlogits) {
  weight_grad.noalias() += dlogits.transpose() * vectors;
  bias_grad.col(0) += dlogits.colwise().sum().transpose();
  return dlogits * weight;
}

Model::Model(const TrainConfig& cfg, const SenseHierarchy& h) {
  EncoderSpec spec = cfg.encoder;
  spec.seed = cfg.seed;
  encoder_ = make_encoder(spec);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  const auto d = encoder_->dim();
  head_l1_ = ClassifierHead(Level::l1, static_cast<Eigen::Index>(h.level1_classes().size()), d, rng);
  head_l2_ = ClassifierHead(Level::l2, static_cast<Eigen::Index>(h.level2_classes().size()), d, rng);
}

std::vector<Parameter> Model::parameters() {
  auto params = encoder_->parameters();
  params.push_back({"head_l1.weight", &head_l1_.weight, &head_l1_.weight_grad});
  params.push_back({"head_l1.bias", &head_l1_.bias, &head_l1_.bias_grad});
  params.push_back({"head_l2.weight", &head_l2_.weight, &head_l2_.weight_grad});
  params.push_back({"head_l2.bias", &head_l2_.bias, &head_l2_.bias_grad});
  return params;
}

void Model::zero_grad() {
  for (auto& p : parameters()) p.grad->setZero(p.value->rows(), p.value->cols());
}

std::map<std::string, MatrixXd> Model::snapshot() {
  std::map<std::string, MatrixXd> out;
  for (const auto& p : parameters()) out.emplace(p.name, *p.value);
  return out;
}

void Model::restore(const std::map<std::string, MatrixXd>& values) {
  const auto params = parameters();
  if (values.size() != params.size())
    throw ValidationError("checkpoint holds " + std::to_string(values.size()) +
                          " tensors, model has " + std::to_string(params.size()));
  for (const auto& p : params) {
    const auto it = values.find(p.name);
    if (it == values.end()) throw ValidationError("checkpoint lacks tensor '" + p.name + "'");
    if (it->second.rows() != p.value->rows() || it->second.cols() != p.value->cols())
      throw ValidationError("checkpoint tensor '" + p.name + "' has the wrong shape");
    *p.value = it->second;
  }
}

std::vector<int> gold_indices(std::span<const RelationExample> batch, Level level,
                              const SenseHierarchy& h) {
  std::vector<int> out;
  out.reserve(batch.size());
  for (const auto& e : batch) {
    if (e.senses.empty()) {
      out.push_back(kIgnoreClass);
      continue;
    }
    const SenseLabel& s = e.senses.front();
    out.push_back(level == Level::l1 ? h.level1_index(s.l1) : h.level2_index(s.level2()));
  }
  return out;
}

Evaluation evaluate(const Model& model, const std::vector<RelationExample>& examples,
                    const SenseHierarchy& h) {
  Evaluation ev;
  double loss_sum = 0.0;
  std::size_t chunks = 0;
  const std::span<const RelationExample> all(examples);
  for (std::size_t start = 0; start < all.size(); start += kEvalChunk) {
    const auto batch = all.subspan(start, std::min<std::size_t>(kEvalChunk, all.size() - start));
    const EncodedBatch enc = model.encoder().encode(batch);
    const MatrixXd l1 = model.head(Level::l1).logits(enc.vectors);
    const MatrixXd l2 = model.head(Level::l2).logits(enc.vectors);
    const auto g1 = gold_indices(batch, Level::l1, h);
    const auto g2 = gold_indices(batch, Level::l2, h);
    loss_sum += cross_entropy(l1, g1) + cross_entropy(l2, g2);
    ++chunks;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      ev.preds_l1[batch[i].rel_id] = h.level1_classes()[argmax_row(l1, row)];
      ev.preds_l2[batch[i].rel_id] = h.level2_classes()[argmax_row(l2, row)];
    }
  }
  ev.loss = chunks == 0 ? 0.0 : loss_sum / static_cast<double>(chunks);
  ev.l1 = score(ev.preds_l1, gold_sets(examples, Level::l1, h), Level::l1, h);
  ev.l2 = score(ev.preds_l2, gold_sets(examples, Level::l2, h), Level::l2, h);
  return ev;
}

void write_history(std::ostream& out, const std::vector<MetricRecord>& history) {
  for (const auto& r : history)
    out << json{{"epoch", r.epoch}, {"split", r.split}, {"metric", r.metric}, {"value", r.value}}
               .dump()
        << '\n';
}

std::vector<MetricRecord> read_history(std::istream& in) {
  std::vector<MetricRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    out.push_back({j.at("epoch").get<int>(), j.at("split").get<std::string>(),
                   j.at("metric").get<std::string>(), j.at("value").get<double>()});
  }
  return out;
}

namespace {

json matrix_to_json(const MatrixXd& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw ValidationError("checkpoint tensor size mismatch");
  return Eigen::Map<const MatrixXd>(data.data(), rows, cols);
}

} // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  std::ostringstream cfg;
  write_config(cfg, ckpt.config);
  json j;
  j["format"] = "hiercon-checkpoint-1";
  j["hierarchy"] = to_string(ckpt.version);
  j["epoch"] = ckpt.epoch;
  j["config"] = cfg.str();
  j["dev_metrics"] = ckpt.dev_metrics;
  json params = json::object();
  for (const auto& [name, m] : ckpt.parameters) params[name] = matrix_to_json(m);
  j["parameters"] = params;
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("checkpoint does not parse: ") + e.what());
  }
  if (j.value("format", "") != "hiercon-checkpoint-1")
    throw ValidationError("not a hiercon checkpoint");
  Checkpoint c;
  c.version = parse_version(j.at("hierarchy").get<std::string>());
  c.epoch = j.at("epoch").get<int>();
  std::istringstream cfg(j.at("config").get<std::string>());
  c.config = read_config(cfg);
  c.dev_metrics = j.at("dev_metrics").get<std::map<std::string, double>>();
  for (const auto& [name, m] : j.at("parameters").items()) c.parameters[name] = matrix_from_json(m);
  return c;
}

std::unique_ptr<Model> model_from_checkpoint(const Checkpoint& ckpt, const SenseHierarchy& h) {
  if (ckpt.version != h.version())
    throw UsageError("checkpoint was trained on " + to_string(ckpt.version) + ", hierarchy is " +
                     to_string(h.version()));
  auto model = std::make_unique<Model>(ckpt.config, h);
  model->restore(ckpt.parameters);
  return model;
}

Trainer::Trainer(const TrainConfig& cfg, const SenseHierarchy& h)
    : cfg_(cfg),
      h_(h),
      model_(cfg, h),
      adam_({cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon}),
      rng_(cfg.seed) {
  cfg_.validate();
}

StepStats Trainer::step(std::span<const RelationExample> batch) {
  if (batch.empty()) throw UsageError("step: empty batch");
  model_.zero_grad();
  const EncodedBatch enc = model_.encoder().forward(batch);
  const MatrixXd& h = enc.vectors;

  auto& head1 = model_.head(Level::l1);
  auto& head2 = model_.head(Level::l2);
  const MatrixXd logits1 = head1.logits(h);
  const MatrixXd logits2 = head2.logits(h);
  const auto gold1 = gold_indices(batch, Level::l1, h_);
  const auto gold2 = gold_indices(batch, Level::l2, h_);

  MatrixXd dlogits1, dlogits2;
  StepStats stats;
  stats.loss.ce_l1 = cross_entropy(logits1, gold1, &dlogits1);
  stats.loss.ce_l2 = cross_entropy(logits2, gold2, &dlogits2);
  stats.loss.beta = cfg_.beta;

  MatrixXd dh = head1.backward(h, dlogits1);
  dh += head2.backward(h, dlogits2);

  if (cfg_.contrastive && batch.size() >= 2) {
    std::vector<SenseLabel> labels;
    labels.reserve(batch.size());
    for (const auto& e : batch) labels.push_back(e.senses.front());
    const PairSelection sel = build_pair_selection(labels, cfg_.strategy);
    MatrixXd dscl;
    stats.loss.scl = hier_contrastive(h, sel, cfg_.temperature, &dscl);
    dh += cfg_.beta * dscl;
  }
  stats.loss.total = stats.loss.ce_l1 + stats.loss.ce_l2 + cfg_.beta * stats.loss.scl;

  if (!all_finite(stats.loss)) {
    std::string ids;
    for (const auto& e : batch) ids += " " + e.rel_id;
    throw TrainingError("non-finite loss (ce_l1=" + std::to_string(stats.loss.ce_l1) +
                        ", ce_l2=" + std::to_string(stats.loss.ce_l2) +
                        ", scl=" + std::to_string(stats.loss.scl) + ") on batch:" + ids);
  }

  model_.encoder().backward(dh);
  const auto params = model_.parameters();
  stats.grad_norm = clip_global_norm(params, cfg_.grad_clip_l2);
  stats.grad_norm_clipped = global_grad_norm(params);
  adam_.step(params);
  return stats;
}

std::vector<RelationExample> training_pool(const std::vector<RelationExample>& train,
                                           bool augmentation) {
  auto expanded = expand_multilabel(train);
  return augmentation ? build_training_pool(expanded) : expanded;
}

TrainResult Trainer::fit(const SplitSet& splits) {
  std::vector<RelationExample> pool = training_pool(splits.train, cfg_.augmentation);
  if (pool.empty()) throw UsageError("train: the training split is empty");

  TrainResult result;
  double best_f1 = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const auto bs = static_cast<std::size_t>(cfg_.batch_size);

  for (int epoch = 1; epoch <= cfg_.max_epochs; ++epoch) {
    std::shuffle(pool.begin(), pool.end(), rng_);
    LossBreakdown sum;
    double max_clipped = 0.0;
    std::size_t batches = 0;
    const std::span<const RelationExample> all(pool);
    for (std::size_t start = 0; start < all.size(); start += bs) {
      const auto batch = all.subspan(start, std::min(bs, all.size() - start));
      const StepStats s = step(batch);
      sum.ce_l1 += s.loss.ce_l1;
      sum.ce_l2 += s.loss.ce_l2;
      sum.scl += s.loss.scl;
      sum.total += s.loss.total;
      max_clipped = std::max(max_clipped, s.grad_norm_clipped);
      result.steps.push_back(s);
      ++batches;
    }
    const auto n = static_cast<double>(batches);
    auto record = [&](const std::string& split, const std::string& metric, double v) {
      result.history.push_back({epoch, split, metric, v});
    };
    record("train", "loss", sum.total / n);
    record("train", "ce_l1", sum.ce_l1 / n);
    record("train", "ce_l2", sum.ce_l2 / n);
    record("train", "scl", sum.scl / n);
    record("train", "max_grad_norm", max_clipped);

    std::map<std::string, double> dev_metrics;
    if (!splits.dev.empty()) {
      const Evaluation ev = evaluate(model_, splits.dev, h_);
      dev_metrics = {{"accuracy_l1", ev.l1.accuracy},
                     {"macro_f1_l1", ev.l1.macro_f1},
                     {"accuracy_l2", ev.l2.accuracy},
                     {"macro_f1_l2", ev.l2.macro_f1},
                     {"loss", ev.loss}};
      best_loss = std::min(best_loss, ev.loss);
      for (const auto& [k, v] : dev_metrics) record("dev", k, v);
      record("dev", "best_loss", best_loss);
    }
    result.epochs_run = epoch;

    const double f1 = dev_metrics.empty() ? 0.0 : dev_metrics["macro_f1_l2"];
    if (f1 > best_f1) {
      best_f1 = f1;
      since_best = 0;
      result.best_epoch = epoch;
      result.best = {cfg_, h_.version(), epoch, dev_metrics, model_.snapshot()};
    } else if (++since_best >= cfg_.patience) {
      break;
    }
  }
  return result;
}

TrainResult train(const TrainConfig& cfg, const SplitSet& splits, const SenseHierarchy& h) {
  Trainer t(cfg, h);
  return t.fit(splits);
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(0.2 * i);
  return grid;
}

std::vector<SweepRow> sweep_beta(const TrainConfig& cfg, const SplitSet& splits,
                                 const SenseHierarchy& h, const std::vector<double>& grid,
                                 const std::vector<std::uint64_t>& seeds) {
  if (grid.empty()) throw UsageError("sweep_beta: empty grid");
  const std::vector<std::uint64_t> use = seeds.empty() ? std::vector{cfg.seed} : seeds;
  std::vector<SweepRow> rows;
  for (double beta : grid) {
    SweepRow row;
    row.beta = beta;
    for (auto seed : use) {
      TrainConfig c = cfg;
      c.beta = beta;
      c.seed = seed;
      const TrainResult r = train(c, splits, h);
      const auto& m = r.best.dev_metrics;
      auto get = [&](const char* k) { return m.contains(k) ? m.at(k) : 0.0; };
      row.dev_accuracy_l1 += get("accuracy_l1");
      row.dev_macro_f1_l1 += get("macro_f1_l1");
      row.dev_accuracy_l2 += get("accuracy_l2");
      row.dev_macro_f1_l2 += get("macro_f1_l2");
    }
    row.seeds = static_cast<int>(use.size());
    const double k = static_cast<double>(use.size());
    row.dev_accuracy_l1 /= k;
    row.dev_macro_f1_l1 /= k;
    row.dev_accuracy_l2 /= k;
    row.dev_macro_f1_l2 /= k;
    rows.push_back(row);
  }
  return rows;
}

} // namespace hiercon
