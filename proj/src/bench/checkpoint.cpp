#include "sbdd/bench/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <sodium.h>

#include "json.hpp"
#include "sbdd/nn/params.hpp"

namespace sbdd::bench {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint payload assumes a little-endian host");

void init_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw NumericError("libsodium failed to initialise");
}

std::string to_base64(const Eigen::VectorXd& v) {
  init_sodium();
  const auto bytes = static_cast<std::size_t>(v.size()) * sizeof(double);
  std::string out(sodium_base64_ENCODED_LEN(bytes, sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(), reinterpret_cast<const unsigned char*>(v.data()), bytes,
                    sodium_base64_VARIANT_ORIGINAL);
  out.pop_back();  // trailing NUL
  return out;
}

Eigen::VectorXd from_base64(const std::string& text, std::size_t n) {
  init_sodium();
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  std::size_t len = 0;
  if (sodium_base642bin(reinterpret_cast<unsigned char*>(v.data()), n * sizeof(double), text.data(), text.size(),
                        nullptr, &len, nullptr, sodium_base64_VARIANT_ORIGINAL) != 0 ||
      len != n * sizeof(double)) {
    throw CheckpointError("checkpoint payload does not decode to " + std::to_string(n) + " values");
  }
  return v;
}

std::string digest(const std::string& text) {
  init_sodium();
  unsigned char h[crypto_generichash_BYTES];
  crypto_generichash(h, sizeof h, reinterpret_cast<const unsigned char*>(text.data()), text.size(), nullptr, 0);
  char hex[2 * crypto_generichash_BYTES + 1];
  sodium_bin2hex(hex, sizeof hex, h, sizeof h);
  return hex;
}

template <class P>
std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes_of(const P& p) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> s;
  p.visit([&](const auto& t) { s.emplace_back(t.rows(), t.cols()); });
  return s;
}

template <class P>
void fill(P& p, const Checkpoint& c, ModelKind want) {
  if (c.kind != want) {
    throw ValidationError("checkpoint kind mismatch: file holds " + std::string(kind_name(c.kind)) + ", expected " +
                          std::string(kind_name(want)));
  }
  if (shapes_of(p) != c.shapes) throw ValidationError("checkpoint shape manifest does not match the architecture");
  if (nn::parameter_count(p) != c.values.size()) throw ValidationError("checkpoint length does not match its shapes");
  nn::unflatten(p, c.values);
}

int arch_value(const Checkpoint& c, const std::string& key) {
  const auto it = c.arch.find(key);
  if (it == c.arch.end() || it->second < 0 || it->second > 4096) {
    throw ValidationError("checkpoint architecture lacks a valid '" + key + "'");
  }
  return it->second;
}

json vec_json(const Eigen::Vector4d& v) { return json::array({v[0], v[1], v[2], v[3]}); }

Eigen::Vector4d vec_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("feature stats must hold 4 values");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

std::string_view kind_name(ModelKind k) noexcept { return k == ModelKind::Scorer ? "scorer" : "com"; }

Checkpoint make_checkpoint(const affinity::ScorerParams& p, const affinity::TrainConfig& train) {
  Checkpoint c;
  c.kind = ModelKind::Scorer;
  const auto head_layers = static_cast<int>(p.head.layers.size());
  c.arch = {{"layers", static_cast<int>(p.layers.size())},
            {"head_layers", head_layers},
            {"head_hidden", head_layers > 1 ? static_cast<int>(p.head.layers.front().weight.rows()) : 0}};
  c.shapes = shapes_of(p);
  c.values = nn::flatten(p);
  c.stats = p.stats;
  c.train = train;
  c.seed = train.seed;
  return c;
}

Checkpoint make_checkpoint(const affinity::ComParams& p, const affinity::TrainConfig& train) {
  Checkpoint c;
  c.kind = ModelKind::Com;
  c.arch = {{"layers", static_cast<int>(p.layers.size())}};
  c.shapes = shapes_of(p);
  c.values = nn::flatten(p);
  c.train = train;
  c.seed = train.seed;
  return c;
}

affinity::ScorerParams scorer_from(const Checkpoint& c) {
  if (c.kind != ModelKind::Scorer) {
    throw ValidationError("checkpoint kind mismatch: file holds " + std::string(kind_name(c.kind)) + ", expected scorer");
  }
  Rng rng(0);
  const int head_layers = arch_value(c, "head_layers");
  auto p = affinity::make_scorer(rng, arch_value(c, "layers"), head_layers > 1 ? arch_value(c, "head_hidden") : 1,
                                 std::max(head_layers, 1));
  fill(p, c, ModelKind::Scorer);
  p.stats = c.stats;
  return p;
}

affinity::ComParams com_from(const Checkpoint& c) {
  if (c.kind != ModelKind::Com) {
    throw ValidationError("checkpoint kind mismatch: file holds " + std::string(kind_name(c.kind)) + ", expected com");
  }
  Rng rng(0);
  auto p = affinity::make_com_model(rng, arch_value(c, "layers"));
  fill(p, c, ModelKind::Com);
  return p;
}

std::string checkpoint_to_string(const Checkpoint& c) {
  json shapes = json::array();
  for (const auto& [r, k] : c.shapes) shapes.push_back({r, k});
  json doc{{"format_version", c.version},
           {"kind", kind_name(c.kind)},
           {"arch", c.arch},
           {"shapes", shapes},
           {"length", c.values.size()},
           {"payload", to_base64(c.values)},
           {"feature_stats", {{"mean", vec_json(c.stats.mean)}, {"std", vec_json(c.stats.std)}}},
           {"train_config",
            {{"seed", c.train.seed},
             {"lr", c.train.lr},
             {"batch_size", c.train.batch_size},
             {"max_steps", c.train.max_steps},
             {"split_fraction", c.train.split_fraction},
             {"eval_every", c.train.eval_every},
             {"patience", c.train.patience}}},
           {"seed", c.seed}};
  doc["checksum"] = digest(doc.dump());
  return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception&) {
    throw CheckpointError("checkpoint checksum failed: file is truncated or not valid JSON");
  }
  if (!doc.is_object() || !doc.contains("checksum") || !doc["checksum"].is_string()) {
    throw CheckpointError("checkpoint checksum missing");
  }
  const std::string stored = doc["checksum"];
  doc.erase("checksum");
  if (digest(doc.dump()) != stored) throw CheckpointError("checkpoint checksum mismatch: file is corrupt");

  Checkpoint c;
  try {
    c.version = doc.at("format_version").get<int>();
    if (c.version != kCheckpointVersion) {
      throw ValidationError("unsupported checkpoint version " + std::to_string(c.version) + ", expected " +
                            std::to_string(kCheckpointVersion));
    }
    const std::string kind = doc.at("kind");
    if (kind == "scorer") {
      c.kind = ModelKind::Scorer;
    } else if (kind == "com") {
      c.kind = ModelKind::Com;
    } else {
      throw ValidationError("unknown checkpoint kind '" + kind + "'");
    }
    c.arch = doc.at("arch").get<std::map<std::string, int>>();
    Eigen::Index total = 0;
    for (const auto& s : doc.at("shapes")) {
      c.shapes.emplace_back(s.at(0).get<Eigen::Index>(), s.at(1).get<Eigen::Index>());
      total += c.shapes.back().first * c.shapes.back().second;
    }
    const auto length = doc.at("length").get<Eigen::Index>();
    if (length != total) throw ValidationError("checkpoint length differs from the sum of its shapes");
    c.values = from_base64(doc.at("payload").get<std::string>(), static_cast<std::size_t>(length));
    c.stats.mean = vec_from(doc.at("feature_stats").at("mean"));
    c.stats.std = vec_from(doc.at("feature_stats").at("std"));
    const auto& t = doc.at("train_config");
    c.train.seed = t.at("seed").get<std::uint64_t>();
    c.train.lr = t.at("lr").get<double>();
    c.train.batch_size = t.at("batch_size").get<int>();
    c.train.max_steps = t.at("max_steps").get<int>();
    c.train.split_fraction = t.at("split_fraction").get<double>();
    c.train.eval_every = t.at("eval_every").get<int>();
    c.train.patience = t.at("patience").get<int>();
    c.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint " + path.string());
  out << checkpoint_to_string(c);
  if (!out) throw ValidationError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

affinity::ScorerParams load_scorer(const std::filesystem::path& path) { return scorer_from(load_checkpoint(path)); }
affinity::ComParams load_com(const std::filesystem::path& path) { return com_from(load_checkpoint(path)); }

}  // namespace sbdd::bench
