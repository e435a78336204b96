#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "hiercon/encoder.hpp"
#include "hiercon/pairing.hpp"

namespace hiercon {

struct TrainConfig {
  double learning_rate = 3e-5;
  int batch_size = 16;
  int max_epochs = 25;
  int patience = 10;
  double grad_clip_l2 = 2.0;
  double beta = 1.0;
  double temperature = 0.1;
  Strategy strategy = Strategy::defaults(StrategyName::ours);
  std::uint64_t seed = 1;
  EncoderSpec encoder;
  /// Connective-insertion augmentation of the training pool.
  bool augmentation = true;
  /// When false the contrastive term is never computed (multi-task baseline).
  bool contrastive = true;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  /// Throws ValidationError when a field is out of range.
  void validate() const;
};

/// Sets one key of the flat key-value form, e.g. "loss.beta" -> "2.0".
/// Setting pairing.strategy resets the three pairing weights to that
/// strategy's defaults. Throws ValidationError for unknown keys or bad values.
void set_config_value(TrainConfig& cfg, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_key_values(std::istream& in);
TrainConfig read_config(std::istream& in, TrainConfig base = {});
void write_config(std::ostream& out, const TrainConfig& cfg);

} // namespace hiercon
