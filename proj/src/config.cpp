#include "hiercon/config.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "hiercon/error.hpp"

namespace hiercon {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ValidationError("config key '" + key + "' expects a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError("config key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ValidationError("config key '" + key + "' expects true/false, got '" + v + "'");
}

} // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError("invalid config: " + m); };
  if (!(learning_rate > 0)) fail("learning_rate must be positive");
  if (batch_size < 1) fail("batch_size must be positive");
  if (max_epochs < 1) fail("max_epochs must be positive");
  if (patience < 1 || patience > max_epochs) fail("patience must lie in [1, max_epochs]");
  if (!(grad_clip_l2 > 0)) fail("grad_clip_l2 must be positive");
  if (!(beta >= 0)) fail("loss.beta must be non-negative");
  if (!(temperature > 0)) fail("loss.temperature must be positive");
  if (!(strategy.pos_weight > 0) || !(strategy.neg_weight > 0) ||
      !(strategy.coarse_pos_weight > 0))
    fail("pairing weights must be positive");
  if (encoder.d < 2) fail("encoder.dim must be at least 2");
  if (encoder.max_length < 4) fail("encoder.max_length must be at least 4");
}

void set_config_value(TrainConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "learning_rate") cfg.learning_rate = to_double(key, value);
  else if (key == "batch_size") cfg.batch_size = static_cast<int>(to_int(key, value));
  else if (key == "max_epochs") cfg.max_epochs = static_cast<int>(to_int(key, value));
  else if (key == "patience") cfg.patience = static_cast<int>(to_int(key, value));
  else if (key == "grad_clip_l2") cfg.grad_clip_l2 = to_double(key, value);
  else if (key == "loss.beta") cfg.beta = to_double(key, value);
  else if (key == "loss.temperature") cfg.temperature = to_double(key, value);
  else if (key == "pairing.strategy") {
    try {
      cfg.strategy = Strategy::defaults(parse_strategy(value));
    } catch (const UsageError& e) {
      throw ValidationError(e.what());
    }
  }
  else if (key == "pairing.pos_weight") cfg.strategy.pos_weight = to_double(key, value);
  else if (key == "pairing.neg_weight") cfg.strategy.neg_weight = to_double(key, value);
  else if (key == "pairing.coarse_pos_weight") cfg.strategy.coarse_pos_weight = to_double(key, value);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "encoder") cfg.encoder.kind = value;
  else if (key == "encoder.dim") cfg.encoder.d = to_int(key, value);
  else if (key == "encoder.max_length") cfg.encoder.max_length = static_cast<std::size_t>(to_int(key, value));
  else if (key == "encoder.adapter_dir") cfg.encoder.adapter_dir = value;
  else if (key == "augmentation") cfg.augmentation = to_bool(key, value);
  else if (key == "contrastive") cfg.contrastive = to_bool(key, value);
  else if (key == "adam.beta1") cfg.adam_beta1 = to_double(key, value);
  else if (key == "adam.beta2") cfg.adam_beta2 = to_double(key, value);
  else if (key == "adam.epsilon") cfg.adam_epsilon = to_double(key, value);
  else throw ValidationError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(n) + " is not key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

TrainConfig read_config(std::istream& in, TrainConfig base) {
  const auto kv = read_key_values(in);
  // The strategy resets weights, so it goes first.
  if (const auto it = kv.find("pairing.strategy"); it != kv.end())
    set_config_value(base, it->first, it->second);
  for (const auto& [k, v] : kv)
    if (k != "pairing.strategy") set_config_value(base, k, v);
  base.validate();
  return base;
}

void write_config(std::ostream& out, const TrainConfig& cfg) {
  std::ostringstream s;
  s.precision(17);
  s << "learning_rate = " << cfg.learning_rate << '\n'
    << "batch_size = " << cfg.batch_size << '\n'
    << "max_epochs = " << cfg.max_epochs << '\n'
    << "patience = " << cfg.patience << '\n'
    << "grad_clip_l2 = " << cfg.grad_clip_l2 << '\n'
    << "loss.beta = " << cfg.beta << '\n'
    << "loss.temperature = " << cfg.temperature << '\n'
    << "pairing.strategy = " << to_string(cfg.strategy.name) << '\n'
    << "pairing.pos_weight = " << cfg.strategy.pos_weight << '\n'
    << "pairing.neg_weight = " << cfg.strategy.neg_weight << '\n'
    << "pairing.coarse_pos_weight = " << cfg.strategy.coarse_pos_weight << '\n'
    << "seed = " << cfg.seed << '\n'
    << "encoder = " << cfg.encoder.kind << '\n'
    << "encoder.dim = " << cfg.encoder.d << '\n'
    << "encoder.max_length = " << cfg.encoder.max_length << '\n';
  if (!cfg.encoder.adapter_dir.empty()) s << "encoder.adapter_dir = " << cfg.encoder.adapter_dir << '\n';
  s << "augmentation = " << (cfg.augmentation ? "true" : "false") << '\n'
    << "contrastive = " << (cfg.contrastive ? "true" : "false") << '\n'
    << "adam.beta1 = " << cfg.adam_beta1 << '\n'
    << "adam.beta2 = " << cfg.adam_beta2 << '\n'
    << "adam.epsilon = " << cfg.adam_epsilon << '\n';
  out << s.str();
}

} // namespace hiercon
