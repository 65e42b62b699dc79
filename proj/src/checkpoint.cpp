// Checkpoint layout:
//   8 bytes   magic "TTACKPT1"
//   8 bytes   header length n, little-endian
//   n bytes   JSON header (format version, shapes, signature, hyperparameters, RNG state)
//   8·k bytes actor then critic parameters, IEEE-754 doubles, little-endian

#include <bit>
#include <cstdint>
#include <cstring>

#include "json.hpp"
#include "tta/agent.hpp"
#include "tta/errors.hpp"

namespace tta {

namespace {

constexpr char kMagic[8] = {'T', 'T', 'A', 'C', 'K', 'P', 'T', '1'};
constexpr int kFormatVersion = 1;

void put_u64(std::string& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + k])) << (8 * k);
  return v;
}

nlohmann::ordered_json hyperparams_json(const Hyperparams& hp) {
  return {{"learning_rate", hp.learning_rate}, {"gamma", hp.gamma},
          {"clip", hp.clip},                   {"value_coef", hp.value_coef},
          {"entropy_coef", hp.entropy_coef},   {"eval_ratio", hp.eval_ratio},
          {"episodes", hp.episodes},           {"max_steps", hp.max_steps},
          {"epochs", hp.epochs},               {"hidden", hp.hidden},
          {"seed", hp.seed}};
}

Hyperparams hyperparams_from(const nlohmann::json& j) {
  Hyperparams hp;
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.gamma = j.at("gamma").get<double>();
  hp.clip = j.at("clip").get<double>();
  hp.value_coef = j.at("value_coef").get<double>();
  hp.entropy_coef = j.at("entropy_coef").get<double>();
  hp.eval_ratio = j.at("eval_ratio").get<int>();
  hp.episodes = j.at("episodes").get<int>();
  hp.max_steps = j.at("max_steps").get<int>();
  hp.epochs = j.at("epochs").get<int>();
  hp.hidden = j.at("hidden").get<int>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const PolicyModel& m = ckpt.model;
  nlohmann::ordered_json header{{"format", kFormatVersion},
                                {"signature", m.signature},
                                {"input_size", m.actor_shape.in},
                                {"hidden", m.actor_shape.hidden},
                                {"actor_params", m.actor.size()},
                                {"critic_params", m.critic.size()},
                                {"hyperparams", hyperparams_json(ckpt.hyperparams)},
                                {"rng_state", ckpt.rng_state}};
  const std::string text = header.dump();
  std::string out(kMagic, sizeof kMagic);
  put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + 8 * m.parameter_count());
  for (double w : m.actor) put_u64(out, std::bit_cast<std::uint64_t>(w));
  for (double w : m.critic) put_u64(out, std::bit_cast<std::uint64_t>(w));
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw ParseError("not a checkpoint file");
  const std::uint64_t n = get_u64(bytes, 8);
  if (n > bytes.size() - 16) throw ParseError("truncated checkpoint header");

  Checkpoint ckpt;
  std::size_t actor_n = 0, critic_n = 0;
  try {
    const auto header = nlohmann::json::parse(bytes.substr(16, n));
    if (header.at("format").get<int>() != kFormatVersion) throw ParseError("unsupported checkpoint format");
    const auto in = header.at("input_size").get<std::size_t>();
    const auto hidden = header.at("hidden").get<std::size_t>();
    ckpt.model.actor_shape = {in, hidden, 2};
    ckpt.model.critic_shape = {in, hidden, 1};
    ckpt.model.signature = header.at("signature").get<std::uint64_t>();
    actor_n = header.at("actor_params").get<std::size_t>();
    critic_n = header.at("critic_params").get<std::size_t>();
    ckpt.hyperparams = hyperparams_from(header.at("hyperparams"));
    ckpt.rng_state = header.at("rng_state").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what());
  }
  if (actor_n != ckpt.model.actor_shape.count() || critic_n != ckpt.model.critic_shape.count())
    throw ParseError("checkpoint parameter counts do not match its shapes");
  const std::size_t body = 16 + n;
  if (bytes.size() != body + 8 * (actor_n + critic_n)) throw ParseError("checkpoint body has the wrong length");

  auto read = [&](std::vector<double>& dst, std::size_t count, std::size_t at) {
    dst.resize(count);
    for (std::size_t k = 0; k < count; ++k) dst[k] = std::bit_cast<double>(get_u64(bytes, at + 8 * k));
  };
  read(ckpt.model.actor, actor_n, body);
  read(ckpt.model.critic, critic_n, body + 8 * actor_n);
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_file(path)); }

}  // namespace tta
