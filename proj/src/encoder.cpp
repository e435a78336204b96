#include "hiercon/encoder.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "hiercon/error.hpp"

namespace hiercon {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    std::size_t b = 0, e = word.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(word[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1]))) --e;
    if (b == e) continue;
    std::string tok = word.substr(b, e - b);
    for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(tok));
  }
  return out;
}

std::vector<std::string> input_tokens(const RelationExample& e, std::size_t max_length,
                                      bool* truncated) {
  auto a1 = tokenize(e.arg1);
  auto a2 = tokenize(e.arg2);
  constexpr std::size_t markers = 3;
  bool cut = false;
  const std::size_t budget = max_length > markers ? max_length - markers : 0;
  while (a1.size() + a2.size() > budget) {
    cut = true;
    if (a1.size() >= a2.size())
      a1.pop_back();
    else
      a2.pop_back();
  }
  if (truncated) *truncated = cut;
  std::vector<std::string> out;
  out.reserve(a1.size() + a2.size() + markers);
  out.emplace_back(kBeginMarker);
  out.insert(out.end(), a1.begin(), a1.end());
  out.emplace_back(kSeparatorMarker);
  out.insert(out.end(), a2.begin(), a2.end());
  out.emplace_back(kSeparatorMarker);
  return out;
}

std::uint64_t stable_hash(std::string_view token) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void Encoder::zero_grad() {
  for (auto& p : parameters()) p.grad->setZero(p.value->rows(), p.value->cols());
}

namespace {

MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

std::vector<std::string> ids_of(std::span<const RelationExample> batch) {
  std::vector<std::string> ids;
  ids.reserve(batch.size());
  for (const auto& e : batch) ids.push_back(e.rel_id);
  return ids;
}

// tanh(x W^T + b^T) row-wise.
MatrixXd dense_tanh(const MatrixXd& x, const MatrixXd& w, const MatrixXd& b) {
  MatrixXd pre = x * w.transpose();
  pre.rowwise() += b.col(0).transpose();
  return pre.array().tanh().matrix();
}

void dense_tanh_backward(const MatrixXd& x, const MatrixXd& out, const MatrixXd& dout,
                         MatrixXd& w_grad, MatrixXd& b_grad) {
  const MatrixXd dpre = (dout.array() * (1.0 - out.array().square())).matrix();
  w_grad.noalias() += dpre.transpose() * x;
  b_grad.col(0) += dpre.colwise().sum().transpose();
}

} // namespace

ToyEncoder::ToyEncoder(Eigen::Index d, std::uint64_t seed, std::size_t max_length)
    : seed_(seed), max_length_(max_length) {
  if (d < 2) throw UsageError("toy encoder width must be at least 2");
  std::mt19937_64 rng(seed);
  weight_ = gaussian(d, d, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  bias_ = gaussian(d, 1, 0.1, rng);
  weight_grad_ = MatrixXd::Zero(d, d);
  bias_grad_ = MatrixXd::Zero(d, 1);
}

MatrixXd ToyEncoder::features(std::span<const RelationExample> batch) const {
  const Eigen::Index d = dim();
  MatrixXd counts = MatrixXd::Zero(static_cast<Eigen::Index>(batch.size()), d);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    bool cut = false;
    for (const auto& tok : input_tokens(batch[i], max_length_, &cut))
      counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(stable_hash(tok) % d)) += 1.0;
    if (cut) ++truncations_;
  }
  return counts;
}

MatrixXd ToyEncoder::encode_counts(const MatrixXd& counts) const {
  return dense_tanh(counts, weight_, bias_);
}

EncodedBatch ToyEncoder::encode(std::span<const RelationExample> batch) const {
  if (batch.empty()) throw UsageError("encode: empty batch");
  return {encode_counts(features(batch)), ids_of(batch), 0};
}

EncodedBatch ToyEncoder::forward(std::span<const RelationExample> batch) {
  if (batch.empty()) throw UsageError("encode: empty batch");
  const std::size_t before = truncations_;
  cached_counts_ = features(batch);
  cached_out_ = encode_counts(cached_counts_);
  return {cached_out_, ids_of(batch), truncations_ - before};
}

void ToyEncoder::backward(const MatrixXd& dvectors) {
  dense_tanh_backward(cached_counts_, cached_out_, dvectors, weight_grad_, bias_grad_);
}

std::vector<Parameter> ToyEncoder::parameters() {
  return {{"encoder.weight", &weight_, &weight_grad_}, {"encoder.bias", &bias_, &bias_grad_}};
}

EncodedBatch toy_encode(std::span<const RelationExample> batch, Eigen::Index d,
                        std::uint64_t seed) {
  return ToyEncoder(d, seed).encode(batch);
}

PretrainedAdapterEncoder::PretrainedAdapterEncoder(const std::filesystem::path& weights_dir,
                                                   Eigen::Index d, std::uint64_t seed,
                                                   std::size_t max_length)
    : dir_(weights_dir), max_length_(max_length) {
  std::ifstream vocab(dir_ / "vocab.txt");
  std::ifstream emb(dir_ / "embeddings.txt");
  if (!vocab || !emb)
    throw LookupError("adapter weights directory '" + dir_.string() +
                      "' must contain vocab.txt and embeddings.txt");
  std::string tok;
  std::vector<std::string> tokens;
  while (std::getline(vocab, tok))
    if (!tok.empty()) tokens.push_back(tok);

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(emb, line)) {
    std::istringstream in(line);
    std::vector<double> row;
    double v;
    while (in >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.size() != tokens.size() || rows.empty())
    throw ValidationError("adapter: vocab.txt and embeddings.txt disagree in length");
  const auto width = static_cast<Eigen::Index>(rows.front().size());
  embeddings_.resize(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != width)
      throw ValidationError("adapter: ragged embeddings.txt");
    for (Eigen::Index c = 0; c < width; ++c)
      embeddings_(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    vocab_.emplace(tokens[r], static_cast<Eigen::Index>(r));
  }
  if (d < 2) throw UsageError("adapter width must be at least 2");
  std::mt19937_64 rng(seed);
  weight_ = gaussian(d, width, 1.0 / std::sqrt(static_cast<double>(width)), rng);
  bias_ = MatrixXd::Zero(d, 1);
  weight_grad_ = MatrixXd::Zero(d, width);
  bias_grad_ = MatrixXd::Zero(d, 1);
}

MatrixXd PretrainedAdapterEncoder::pooled(std::span<const RelationExample> batch) const {
  MatrixXd x = MatrixXd::Zero(static_cast<Eigen::Index>(batch.size()), embeddings_.cols());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    bool cut = false;
    int found = 0;
    for (const auto& tok : input_tokens(batch[i], max_length_, &cut)) {
      const auto it = vocab_.find(tok);
      if (it == vocab_.end()) continue;
      x.row(static_cast<Eigen::Index>(i)) += embeddings_.row(it->second);
      ++found;
    }
    if (found > 0) x.row(static_cast<Eigen::Index>(i)) /= found;
    if (cut) ++truncations_;
  }
  return x;
}

EncodedBatch PretrainedAdapterEncoder::encode(std::span<const RelationExample> batch) const {
  if (batch.empty()) throw UsageError("encode: empty batch");
  return {dense_tanh(pooled(batch), weight_, bias_), ids_of(batch), 0};
}

EncodedBatch PretrainedAdapterEncoder::forward(std::span<const RelationExample> batch) {
  if (batch.empty()) throw UsageError("encode: empty batch");
  const std::size_t before = truncations_;
  cached_in_ = pooled(batch);
  cached_out_ = dense_tanh(cached_in_, weight_, bias_);
  return {cached_out_, ids_of(batch), truncations_ - before};
}

void PretrainedAdapterEncoder::backward(const MatrixXd& dvectors) {
  dense_tanh_backward(cached_in_, cached_out_, dvectors, weight_grad_, bias_grad_);
}

std::vector<Parameter> PretrainedAdapterEncoder::parameters() {
  return {{"encoder.weight", &weight_, &weight_grad_}, {"encoder.bias", &bias_, &bias_grad_}};
}

std::unique_ptr<Encoder> make_encoder(const EncoderSpec& spec) {
  if (spec.kind == "toy") return std::make_unique<ToyEncoder>(spec.d, spec.seed, spec.max_length);
  if (spec.kind == "adapter") {
    std::string dir = spec.adapter_dir;
    if (dir.empty()) {
      const char* env = std::getenv(kAdapterWeightsEnv);
      if (env == nullptr || *env == '\0')
        throw UsageError(std::string("adapter encoder needs a weights directory; set ") +
                         kAdapterWeightsEnv);
      dir = env;
    }
    return std::make_unique<PretrainedAdapterEncoder>(dir, spec.d, spec.seed, spec.max_length);
  }
  throw UsageError("unknown encoder kind '" + spec.kind + "'");
}

} // namespace hiercon
