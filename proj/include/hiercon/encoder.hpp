#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "hiercon/corpus.hpp"

namespace hiercon {

using MatrixXd = Eigen::MatrixXd;

/// Row i is the begin-marker representation of input example i.
struct EncodedBatch {
  MatrixXd vectors;
  std::vector<std::string> ids;
  std::size_t truncated = 0;

  Eigen::Index d() const { return vectors.cols(); }
};

/// A trainable tensor and its gradient accumulator.
struct Parameter {
  std::string name;
  MatrixXd* value = nullptr;
  MatrixXd* grad = nullptr;
};

inline constexpr const char* kBeginMarker = "<s>";
inline constexpr const char* kSeparatorMarker = "</s>";
inline constexpr std::size_t kDefaultMaxLength = 256;

/// Lowercased whitespace tokens with surrounding punctuation stripped.
std::vector<std::string> tokenize(std::string_view text);

/// begin-marker, arg1, separator, arg2, separator. When longer than
/// `max_length`, tokens are dropped from the tail of the longer argument
/// until it fits and `*truncated` is set.
std::vector<std::string> input_tokens(const RelationExample& e,
                                      std::size_t max_length = kDefaultMaxLength,
                                      bool* truncated = nullptr);

/// FNV-1a, stable across platforms and runs.
std::uint64_t stable_hash(std::string_view token);

class Encoder {
public:
  virtual ~Encoder() = default;

  virtual std::string kind() const = 0;
  virtual Eigen::Index dim() const = 0;

  /// Stateless encode for evaluation.
  virtual EncodedBatch encode(std::span<const RelationExample> batch) const = 0;

  /// Encode and keep what backward() needs.
  virtual EncodedBatch forward(std::span<const RelationExample> batch) = 0;

  /// Accumulates parameter gradients for the last forward() batch.
  virtual void backward(const MatrixXd& dvectors) = 0;

  virtual std::vector<Parameter> parameters() = 0;

  void zero_grad();

  /// Total truncated inputs seen by encode()/forward().
  std::size_t truncations() const { return truncations_; }

protected:
  mutable std::size_t truncations_ = 0;
};

/// Hashed bag-of-tokens followed by a seeded linear map and tanh:
/// h = tanh(W c + b), c the bucket counts of the input tokens.
class ToyEncoder final : public Encoder {
public:
  ToyEncoder(Eigen::Index d, std::uint64_t seed, std::size_t max_length = kDefaultMaxLength);

  std::string kind() const override { return "toy"; }
  Eigen::Index dim() const override { return weight_.rows(); }
  std::uint64_t seed() const { return seed_; }
  std::size_t max_length() const { return max_length_; }

  /// Bucket counts, one row per example.
  MatrixXd features(std::span<const RelationExample> batch) const;
  /// Encodes a row of precomputed counts.
  MatrixXd encode_counts(const MatrixXd& counts) const;

  EncodedBatch encode(std::span<const RelationExample> batch) const override;
  EncodedBatch forward(std::span<const RelationExample> batch) override;
  void backward(const MatrixXd& dvectors) override;
  std::vector<Parameter> parameters() override;

  const MatrixXd& weight() const { return weight_; }
  const MatrixXd& bias() const { return bias_; }

private:
  std::uint64_t seed_;
  std::size_t max_length_;
  MatrixXd weight_, bias_;
  MatrixXd weight_grad_, bias_grad_;
  MatrixXd cached_counts_, cached_out_;
};

/// Deterministic encode with a freshly seeded toy encoder.
EncodedBatch toy_encode(std::span<const RelationExample> batch, Eigen::Index d,
                        std::uint64_t seed);

/// Adapter over externally supplied pretrained token embeddings. The weights
/// directory holds `vocab.txt` (one token per line) and `embeddings.txt`
/// (one whitespace-separated row per vocabulary entry). The frozen mean
/// token embedding is projected by a trainable tanh layer of width `d`.
class PretrainedAdapterEncoder final : public Encoder {
public:
  PretrainedAdapterEncoder(const std::filesystem::path& weights_dir, Eigen::Index d,
                           std::uint64_t seed, std::size_t max_length = kDefaultMaxLength);

  std::string kind() const override { return "adapter"; }
  Eigen::Index dim() const override { return weight_.rows(); }
  const std::filesystem::path& weights_dir() const { return dir_; }

  EncodedBatch encode(std::span<const RelationExample> batch) const override;
  EncodedBatch forward(std::span<const RelationExample> batch) override;
  void backward(const MatrixXd& dvectors) override;
  std::vector<Parameter> parameters() override;

private:
  MatrixXd pooled(std::span<const RelationExample> batch) const;

  std::filesystem::path dir_;
  std::size_t max_length_;
  std::unordered_map<std::string, Eigen::Index> vocab_;
  MatrixXd embeddings_;
  MatrixXd weight_, bias_;
  MatrixXd weight_grad_, bias_grad_;
  MatrixXd cached_in_, cached_out_;
};

/// Environment variable naming the adapter weights directory.
inline constexpr const char* kAdapterWeightsEnv = "HIERCON_ADAPTER_WEIGHTS";

struct EncoderSpec {
  std::string kind = "toy";
  Eigen::Index d = 64;
  std::uint64_t seed = 1;
  std::size_t max_length = kDefaultMaxLength;
  std::string adapter_dir;
};

/// Builds "toy" or "adapter". An empty adapter_dir falls back to the
/// environment variable; throws UsageError when neither is set.
std::unique_ptr<Encoder> make_encoder(const EncoderSpec& spec);

} // namespace hiercon
