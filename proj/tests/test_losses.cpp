#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hiercon/losses.hpp"
#include "oracles.hpp"

using namespace hiercon;

namespace {

const SenseHierarchy& pdtb3() { return builtin_hierarchy(HierarchyVersion::pdtb3); }

SenseLabel lab(const char* s) { return resolve_terminal(s, pdtb3()); }

} // namespace

TEST_CASE("cross_entropy of equal logits is ln C") {
  const MatrixXd logits = MatrixXd::Constant(3, 5, 0.7);
  const std::vector<int> gold{0, 2, 4};
  CHECK(cross_entropy(logits, gold) == doctest::Approx(std::log(5.0)).epsilon(1e-15));
}

TEST_CASE("cross_entropy saturates to zero and survives huge logits") {
  MatrixXd logits = MatrixXd::Zero(2, 4);
  logits(0, 1) = 30;
  logits(1, 3) = 30;
  const std::vector<int> gold{1, 3};
  CHECK(cross_entropy(logits, gold) < 1e-9);

  MatrixXd huge = MatrixXd::Constant(1, 3, 1e4);
  huge(0, 0) = 1e4 + 1;
  const std::vector<int> g0{0};
  CHECK(std::isfinite(cross_entropy(huge, g0)));
}

TEST_CASE("cross_entropy matches a 50-digit softmax oracle") {
  using Big = boost::multiprecision::cpp_bin_float_50;
  std::mt19937_64 rng(11);
  const MatrixXd logits = oracle::random_matrix(3, 4, rng) * 3.0;
  const std::vector<int> gold{2, 0, 3};
  Big total = 0;
  for (int i = 0; i < 3; ++i) {
    Big z = 0;
    for (int c = 0; c < 4; ++c) z += boost::multiprecision::exp(Big(logits(i, c)));
    total += boost::multiprecision::log(z) - Big(logits(i, gold[i]));
  }
  const double expected = static_cast<double>(total / 3);
  CHECK(oracle::relative_error(cross_entropy(logits, gold), expected) < 1e-10);
}

TEST_CASE("cross_entropy skips ignored rows") {
  MatrixXd logits(2, 3);
  logits << 1, 2, 3, 9, -4, 0.5;
  const std::vector<int> both{2, kIgnoreClass};
  const std::vector<int> one{2};
  CHECK(cross_entropy(logits, both) == doctest::Approx(cross_entropy(MatrixXd(logits.topRows(1)), one)));
  const std::vector<int> none{kIgnoreClass, kIgnoreClass};
  MatrixXd grad;
  CHECK(cross_entropy(logits, none, &grad) == 0.0);
  CHECK(grad.isZero());
  const std::vector<int> bad{3, 0};
  CHECK_THROWS_AS(cross_entropy(logits, bad), UsageError);
}

TEST_CASE("cross_entropy gradient matches central differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd logits = oracle::random_matrix(6, 5, rng);
    std::vector<int> gold;
    for (int i = 0; i < 6; ++i) gold.push_back(static_cast<int>(rng() % 5));
    MatrixXd grad;
    cross_entropy(logits, gold, &grad);
    const double err = oracle::gradient_check(
        logits, grad, [&](const MatrixXd& x) { return cross_entropy(x, gold); });
    CHECK(err < 1e-4);
  }
}

TEST_CASE("supcon_reference edge cases") {
  MatrixXd h(2, 3);
  h << 1, 2, 3, 1, 2, 3;
  const std::vector<std::string> same{"a", "a"};
  CHECK(supcon_reference(h, same, 1.0) == doctest::Approx(0.0).epsilon(1e-15));

  const std::vector<std::string> different{"a", "b"};
  CHECK(supcon_reference(h, different, 1.0) == 0.0);
  CHECK_THROWS_AS(supcon_reference(MatrixXd(h.topRows(1)), std::vector<std::string>{"a"}, 1.0),
                  UsageError);
}

TEST_CASE("supcon_reference matches direct summation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd h = oracle::random_matrix(4, 6, rng);
    std::vector<std::string> labels;
    for (int i = 0; i < 4; ++i) labels.push_back(std::string(1, static_cast<char>('a' + rng() % 2)));
    const double expected = static_cast<double>(oracle::supcon(h, labels, 0.5L));
    const double got = supcon_reference(h, labels, 0.5);
    CHECK(std::abs(got - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("supcon_reference on duplicated batches matches direct summation") {
  // Each anchor's copy joins its denominator at similarity 1, so the loss
  // grows under duplication rather than shrinking.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd h = oracle::random_matrix(6, 4, rng);
    std::vector<std::string> labels;
    for (int i = 0; i < 6; ++i) labels.push_back(std::string(1, static_cast<char>('a' + rng() % 3)));
    MatrixXd twice(12, 4);
    twice << h, h;
    std::vector<std::string> labels2 = labels;
    labels2.insert(labels2.end(), labels.begin(), labels.end());
    const double expected = static_cast<double>(oracle::supcon(twice, labels2, 0.5L));
    CHECK(oracle::relative_error(supcon_reference(twice, labels2, 0.5), expected) < 1e-9);
    CHECK(supcon_reference(twice, labels2, 0.5) > supcon_reference(h, labels, 0.5));
  }
}

TEST_CASE("hier_contrastive single-candidate anchors cost nothing") {
  MatrixXd h(2, 3);
  h << 1, 0, 0, 0, 1, 0;
  const std::vector<SenseLabel> labels{lab("Temporal.Synchronous"), lab("Temporal.Synchronous")};
  for (double w : {1.0, 1.6}) {
    Strategy s = Strategy::defaults(StrategyName::ours);
    s.pos_weight = w;
    CHECK(hier_contrastive(h, build_pair_selection(labels, s), 0.1) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("hier_contrastive is scale invariant and needs a positive temperature") {
  std::mt19937_64 rng(8);
  const auto labels = oracle::random_labels(pdtb3(), 10, rng, 4);
  const auto sel = build_pair_selection(labels, Strategy::defaults(StrategyName::ours));
  const MatrixXd h = oracle::random_matrix(10, 8, rng);
  const double base = hier_contrastive(h, sel, 0.1);
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    const MatrixXd scaled = c * h;
    CHECK(oracle::relative_error(hier_contrastive(scaled, sel, 0.1), base) < 1e-9);
  }
  CHECK_THROWS_AS(hier_contrastive(h, sel, 0.0), UsageError);
}

TEST_CASE("hier_contrastive treats zero vectors as orthogonal to everything") {
  MatrixXd h(3, 2);
  h << 0, 0, 1, 0, 0.5, 0.5;
  const std::vector<SenseLabel> labels{lab("Temporal.Synchronous"), lab("Temporal.Synchronous"),
                                       lab("Temporal.Asynchronous.Precedence")};
  const auto sel = build_pair_selection(labels, Strategy::defaults(StrategyName::ours));
  MatrixXd grad;
  const double loss = hier_contrastive(h, sel, 0.5, &grad);
  CHECK(std::isfinite(loss));
  CHECK(grad.row(0).isZero());
  std::vector<oracle::PairSets> sets;
  for (int i = 0; i < 3; ++i)
    sets.push_back(oracle::brute_force_pairs(labels, i, Strategy::defaults(StrategyName::ours)));
  CHECK(oracle::relative_error(loss, static_cast<double>(oracle::weighted_contrastive(h, sets, 0.5L))) < 1e-12);
}

TEST_CASE("hier_contrastive on a six-row temporal batch matches direct summation") {
  const std::vector<SenseLabel> labels{
      lab("Temporal.Asynchronous.Precedence"), lab("Temporal.Asynchronous.Succession"),
      lab("Temporal.Synchronous"),             lab("Temporal.Asynchronous.Precedence"),
      lab("Temporal.Asynchronous.Succession"), lab("Temporal.Synchronous")};
  std::mt19937_64 rng(21);
  const MatrixXd h = oracle::random_matrix(6, 5, rng);
  const Strategy s = Strategy::defaults(StrategyName::ours);
  REQUIRE(s.pos_weight == 1.6);
  REQUIRE(s.neg_weight == 1.0);
  std::vector<oracle::PairSets> sets;
  for (int i = 0; i < 6; ++i) sets.push_back(oracle::brute_force_pairs(labels, i, s));
  const double expected = static_cast<double>(oracle::weighted_contrastive(h, sets, 0.1L));
  CHECK(oracle::relative_error(hier_contrastive(h, build_pair_selection(labels, s), 0.1), expected) <
        1e-9);
}

TEST_CASE("hier_contrastive reduces to supcon with all-negatives and unit weights") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 10);
    const auto labels = oracle::random_labels(pdtb3(), n, rng, 3);
    const MatrixXd h = oracle::random_matrix(n, 7, rng);
    PairSelection sel;
    std::vector<std::string> terms;
    for (int i = 0; i < n; ++i) {
      terms.push_back(labels[i].terminal);
      AnchorPairs a;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (labels[j].terminal == labels[i].terminal) {
          a.positives.push_back(j);
          a.positive_weights.push_back(1.0);
        } else {
          a.negatives.push_back(j);
          a.negative_weights.push_back(1.0);
        }
      }
      sel.anchors.push_back(a);
    }
    const double ref = supcon_reference(h, terms, 0.1);
    CHECK(oracle::relative_error(hier_contrastive(h, sel, 0.1), ref) < 1e-9);
  }
}

TEST_CASE("hier_contrastive is permutation invariant") {
  std::mt19937_64 rng(17);
  const auto labels = oracle::random_labels(pdtb3(), 12, rng, 5);
  const MatrixXd h = oracle::random_matrix(12, 6, rng);
  const Strategy s = Strategy::defaults(StrategyName::ours);
  const double base = hier_contrastive(h, build_pair_selection(labels, s), 0.2);
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<SenseLabel> pl;
  MatrixXd ph(12, 6);
  for (int i = 0; i < 12; ++i) {
    pl.push_back(labels[perm[i]]);
    ph.row(i) = h.row(perm[i]);
  }
  CHECK(oracle::relative_error(hier_contrastive(ph, build_pair_selection(pl, s), 0.2), base) < 1e-9);
}

TEST_CASE("hier_contrastive gradient matches central differences") {
  std::mt19937_64 rng(99);
  for (auto name : {StrategyName::ours, StrategyName::method1, StrategyName::method3}) {
    for (int trial = 0; trial < 8; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 10);
      const auto labels = oracle::random_labels(pdtb3(), n, rng, 4);
      const auto sel = build_pair_selection(labels, Strategy::defaults(name));
      const MatrixXd h = oracle::random_matrix(n, 1 + static_cast<int>(rng() % 16), rng);
      MatrixXd grad;
      hier_contrastive(h, sel, 0.5, &grad);
      const double err = oracle::gradient_check(
          h, grad, [&](const MatrixXd& x) { return hier_contrastive(x, sel, 0.5); });
      CHECK(err < 1e-4);
    }
  }
}

TEST_CASE("combined_loss adds the weighted contrastive term") {
  MatrixXd l1(2, 4), l2(2, 3);
  l1 << 0.1, 0.2, -1, 2, 3, 0, 0, 1;
  l2 << 1, 1, 1, -2, 0.5, 0.3;
  const std::vector<int> g1{3, 0}, g2{1, 2};
  const auto zero = combined_loss(l1, l2, g1, g2, 4.2, 0.0);
  CHECK(zero.total == zero.ce_l1 + zero.ce_l2);
  const auto one = combined_loss(l1, l2, g1, g2, 4.2, 1.0);
  const auto two = combined_loss(l1, l2, g1, g2, 4.2, 2.0);
  CHECK(one.total == doctest::Approx(one.ce_l1 + one.ce_l2 + 4.2).epsilon(1e-12));
  CHECK(two.total >= one.total);
  CHECK(one.total >= zero.total);
  CHECK_THROWS_AS(combined_loss(l1, l2, g1, g2, 1.0, -0.1), UsageError);
}
