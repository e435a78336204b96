#include <doctest.h>

#include <sstream>

#include "hiercon/config.hpp"
#include "hiercon/error.hpp"
#include "hiercon/synth.hpp"
#include "hiercon/trainer.hpp"
#include "oracles.hpp"

using namespace hiercon;

namespace {

const SenseHierarchy& pdtb3() { return builtin_hierarchy(HierarchyVersion::pdtb3); }

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.max_epochs = 3;
  cfg.patience = 3;
  cfg.encoder.d = 16;
  return cfg;
}

SplitSet small_splits(std::uint64_t seed = 1, int per_class = 6) {
  return split_sections(generate(pdtb3(), per_class, seed, 0.05));
}

// Forward-only total loss of the current parameters.
double total_loss(Model& m, std::span<const RelationExample> batch, const TrainConfig& cfg) {
  const MatrixXd h = m.encoder().encode(batch).vectors;
  double loss = cross_entropy(m.head(Level::l1).logits(h), gold_indices(batch, Level::l1, pdtb3())) +
                cross_entropy(m.head(Level::l2).logits(h), gold_indices(batch, Level::l2, pdtb3()));
  if (cfg.contrastive) {
    std::vector<SenseLabel> labels;
    for (const auto& e : batch) labels.push_back(e.senses.front());
    loss += cfg.beta * hier_contrastive(h, build_pair_selection(labels, cfg.strategy), cfg.temperature);
  }
  return loss;
}

std::string history_text(const std::vector<MetricRecord>& h) {
  std::ostringstream out;
  write_history(out, h);
  return out.str();
}

std::string checkpoint_text(const Checkpoint& c) {
  std::ostringstream out;
  save_checkpoint(out, c);
  return out.str();
}

} // namespace

TEST_CASE("full model gradient matches finite differences") {
  const auto splits = small_splits(2);
  const auto pool = training_pool(splits.train, true);
  const std::span<const RelationExample> batch(pool.data(), 12);
  for (auto name : {StrategyName::ours, StrategyName::method3}) {
    TrainConfig cfg = small_config();
    cfg.encoder.d = 6;
    cfg.beta = 1.5;
    cfg.temperature = 0.5;
    cfg.grad_clip_l2 = 1e12;
    cfg.strategy = Strategy::defaults(name);
    Trainer t(cfg, pdtb3());
    const auto before = t.model().snapshot();
    t.step(batch);
    std::map<std::string, MatrixXd> grads;
    for (const auto& p : t.model().parameters()) grads[p.name] = *p.grad;
    t.model().restore(before);

    for (const auto& p : t.model().parameters()) {
      MatrixXd* value = p.value;
      const MatrixXd x0 = *value;
      const double err = oracle::gradient_check(x0, grads.at(p.name), [&](const MatrixXd& x) {
        *value = x;
        const double l = total_loss(t.model(), batch, cfg);
        *value = x0;
        return l;
      });
      INFO(p.name);
      CHECK(err < 1e-6);
    }
  }
}

TEST_CASE("beta zero matches the multi-task baseline for the first step") {
  const auto splits = small_splits();
  const auto pool = training_pool(splits.train, true);
  const std::span<const RelationExample> batch(pool.data(), 16);

  TrainConfig with = small_config();
  with.beta = 0.0;
  TrainConfig without = with;
  without.contrastive = false;
  Trainer a(with, pdtb3()), b(without, pdtb3());
  const auto sa = a.step(batch);
  const auto sb = b.step(batch);
  CHECK(sa.loss.total == sa.loss.ce_l1 + sa.loss.ce_l2);
  CHECK(sa.loss.total == sb.loss.total);
  CHECK(a.model().snapshot() == b.model().snapshot());

  TrainConfig pos = with;
  pos.beta = 1.0;
  Trainer c(pos, pdtb3());
  const auto sc = c.step(batch);
  CHECK(sc.loss.ce_l1 == sa.loss.ce_l1);
  CHECK(sc.loss.ce_l2 == sa.loss.ce_l2);
  CHECK(sc.loss.scl > 0);
}

TEST_CASE("gradient norm is clipped at every step") {
  TrainConfig cfg = small_config();
  cfg.learning_rate = 0.05;
  cfg.beta = 2.0;
  const auto r = train(cfg, small_splits(), pdtb3());
  REQUIRE(!r.steps.empty());
  bool clipped = false;
  for (const auto& s : r.steps) {
    CHECK(s.grad_norm_clipped <= 2.0 + 1e-6);
    clipped = clipped || s.grad_norm > 2.0;
  }
  CHECK(clipped);
}

TEST_CASE("training is deterministic") {
  const auto splits = small_splits();
  const auto a = train(small_config(), splits, pdtb3());
  const auto b = train(small_config(), splits, pdtb3());
  CHECK(history_text(a.history) == history_text(b.history));
  CHECK(checkpoint_text(a.best) == checkpoint_text(b.best));
  TrainConfig other = small_config();
  other.seed = 2;
  CHECK(history_text(train(other, splits, pdtb3()).history) != history_text(a.history));
}

TEST_CASE("checkpoint round trip reproduces dev metrics") {
  const auto splits = small_splits();
  const auto r = train(small_config(), splits, pdtb3());
  std::stringstream s(checkpoint_text(r.best));
  const Checkpoint c = load_checkpoint(s);
  CHECK(c.epoch == r.best.epoch);
  CHECK(checkpoint_text(c) == checkpoint_text(r.best));
  const auto model = model_from_checkpoint(c, pdtb3());
  const Evaluation ev = evaluate(*model, splits.dev, pdtb3());
  CHECK(ev.l2.macro_f1 == r.best.dev_metrics.at("macro_f1_l2"));
  CHECK(ev.l1.accuracy == r.best.dev_metrics.at("accuracy_l1"));

  std::stringstream bad("{\"format\": \"other\"}");
  CHECK_THROWS(load_checkpoint(bad));
}

TEST_CASE("history round trip and best-loss record") {
  const auto r = train(small_config(), small_splits(), pdtb3());
  std::stringstream s(history_text(r.history));
  const auto back = read_history(s);
  CHECK(history_text(back) == history_text(r.history));
  double last = std::numeric_limits<double>::infinity();
  for (const auto& m : r.history)
    if (m.split == "dev" && m.metric == "best_loss") {
      CHECK(m.value <= last);
      last = m.value;
    }
}

TEST_CASE("early stopping respects patience") {
  TrainConfig cfg = small_config();
  cfg.learning_rate = 1e-12;
  cfg.max_epochs = 20;
  cfg.patience = 2;
  const auto r = train(cfg, small_splits(), pdtb3());
  CHECK(r.epochs_run <= r.best_epoch + cfg.patience);
  CHECK(r.epochs_run < cfg.max_epochs);
}

TEST_CASE("excluded level-2 senses are ignored by the level-2 head") {
  RelationExample e;
  e.senses = {resolve_terminal("Expansion.Disjunction", pdtb3())};
  const std::vector<RelationExample> batch{e};
  CHECK(gold_indices(batch, Level::l2, pdtb3()) == std::vector<int>{kIgnoreClass});
  CHECK(gold_indices(batch, Level::l1, pdtb3()) == std::vector<int>{pdtb3().level1_index("Expansion")});
}

TEST_CASE("sweep rows follow the grid") {
  CHECK(default_beta_grid().size() == 13);
  CHECK(default_beta_grid().back() == doctest::Approx(2.4));
  TrainConfig cfg = small_config();
  cfg.max_epochs = 1;
  cfg.patience = 1;
  const auto rows = sweep_beta(cfg, small_splits(), pdtb3(), {0.0});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].beta == 0.0);
  CHECK(rows[0].seeds == 1);
  CHECK_THROWS_AS(sweep_beta(cfg, small_splits(), pdtb3(), {}), UsageError);
}

TEST_CASE("config key-values") {
  TrainConfig cfg;
  set_config_value(cfg, "pairing.strategy", "method4");
  CHECK(cfg.strategy.coarse_pos_weight == 1.3);
  set_config_value(cfg, "loss.beta", "2.0");
  CHECK(cfg.beta == 2.0);
  CHECK_THROWS_AS(set_config_value(cfg, "loss.gamma", "1"), ValidationError);
  CHECK_THROWS_AS(set_config_value(cfg, "batch_size", "many"), ValidationError);

  std::stringstream s;
  write_config(s, cfg);
  const TrainConfig back = read_config(s);
  std::stringstream again;
  write_config(again, back);
  CHECK(again.str() == s.str());

  cfg.patience = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("empty training split") {
  SplitSet s;
  CHECK_THROWS_AS(train(small_config(), s, pdtb3()), UsageError);
}
