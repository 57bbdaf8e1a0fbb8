#include "epaae/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace epaae {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

using nlohmann::json;

json noise_to_json(const NoiseSpec& n) {
  return json{{"zeta", n.zeta},
              {"drop_p", n.drop_p},
              {"scale_dist", scale_dist_name(n.scale_dist)},
              {"seed", n.seed},
              {"clamp_scale", n.clamp_scale}};
}

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec n;
  n.zeta = j.at("zeta").get<double>();
  n.drop_p = j.at("drop_p").get<double>();
  n.scale_dist = parse_scale_dist(j.at("scale_dist").get<std::string>());
  n.seed = j.at("seed").get<uint64_t>();
  n.clamp_scale = j.at("clamp_scale").get<bool>();
  return n;
}

json config_json(const ModelConfig& c) {
  return json{{"emb_dim", c.emb_dim},
              {"hidden_dim", c.hidden_dim},
              {"latent_dim", c.latent_dim},
              {"disc_hidden", c.disc_hidden},
              {"lambda_adv", c.lambda_adv},
              {"lr", c.lr},
              {"adam_betas", json::array({c.adam_beta1, c.adam_beta2})},
              {"epochs", c.epochs},
              {"model_kind", model_kind_name(c.model_kind)},
              {"beta", c.beta},
              {"lambda1", c.lambda1},
              {"batch_size", c.batch_size},
              {"max_len", c.max_len},
              {"noise", noise_to_json(c.noise)}};
}

ModelConfig config_from(const json& j) {
  ModelConfig c;
  c.emb_dim = j.at("emb_dim").get<int64_t>();
  c.hidden_dim = j.at("hidden_dim").get<int64_t>();
  c.latent_dim = j.at("latent_dim").get<int64_t>();
  c.disc_hidden = j.at("disc_hidden").get<int64_t>();
  c.lambda_adv = j.at("lambda_adv").get<double>();
  c.lr = j.at("lr").get<double>();
  c.adam_beta1 = j.at("adam_betas").at(0).get<double>();
  c.adam_beta2 = j.at("adam_betas").at(1).get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.model_kind = parse_model_kind(j.at("model_kind").get<std::string>());
  c.beta = j.at("beta").get<double>();
  c.lambda1 = j.at("lambda1").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.max_len = j.at("max_len").get<int>();
  c.noise = noise_from_json(j.at("noise"));
  return c;
}

constexpr char kMagic[7] = {'E', 'P', 'A', 'A', 'E', '1', '\0'};

void write_u64(std::ostream& out, uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint64_t read_u64(std::istream& in) {
  uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

std::string config_to_json(const ModelConfig& config) {
  return config_json(config).dump();
}

ModelConfig config_from_json(const std::string& json_text) {
  return config_from(json::parse(json_text));
}

void save_checkpoint(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out.write(kMagic, sizeof(kMagic));

  json header{{"config", config_json(model.config())},
              {"vocab", model.vocab().tokens()}};
  const std::string htext = header.dump();
  write_u64(out, htext.size());
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));

  for (const auto& [name, t] : model.named_params()) {
    write_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(out, static_cast<uint64_t>(t.rank()));
    for (int i = 0; i < t.rank(); ++i)
      write_u64(out, static_cast<uint64_t>(t.dim(i)));
    std::vector<float> f(t.data().begin(), t.data().end());
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::unique_ptr<Model> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path);

  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path +
                             " (not a model file or corrupted)");

  const uint64_t hlen = read_u64(in);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw std::runtime_error("checkpoint: truncated header");

  json header = json::parse(htext);
  ModelConfig config = config_from(header.at("config"));
  Vocab vocab = Vocab::from_tokens(header.at("vocab").get<std::vector<std::string>>());

  Rng init(0);  // values are overwritten below
  auto model = std::make_unique<Model>(config, std::move(vocab), init);

  size_t loaded = 0;
  for (;;) {
    uint64_t name_len = 0;
    in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
    if (in.eof()) break;
    if (!in) throw std::runtime_error("checkpoint: truncated record");
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    const uint64_t rank = read_u64(in);
    Shape shape(rank);
    uint64_t count = 1;
    for (uint64_t i = 0; i < rank; ++i) {
      shape[i] = static_cast<int64_t>(read_u64(in));
      count *= static_cast<uint64_t>(shape[i]);
    }
    std::vector<float> f(count);
    in.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor " + name);

    Tensor t = model->param(name);
    if (t.shape() != shape)
      throw std::runtime_error("checkpoint: shape mismatch for " + name +
                               ": file " + shape_str(shape) + " vs model " +
                               shape_str(t.shape()));
    auto dst = t.mutable_data();
    for (size_t i = 0; i < f.size(); ++i) dst[i] = static_cast<double>(f[i]);
    ++loaded;
  }
  if (loaded != model->named_params().size())
    throw std::runtime_error("checkpoint: expected " +
                             std::to_string(model->named_params().size()) +
                             " tensors, found " + std::to_string(loaded));
  return model;
}

}  // namespace epaae
