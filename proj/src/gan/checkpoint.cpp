#include "nsaug/gan/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <vector>

#include "json.hpp"

namespace nsaug::gan {

namespace {

constexpr char kMagic[8] = {'N', 'S', 'G', 'A', 'N', 'C', 'K', '1'};
constexpr uint32_t kVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_all(std::FILE* f, const void* data, size_t len, const std::string& path) {
    if (std::fwrite(data, 1, len, f) != len)
        throw IoError("checkpoint: short write to " + path);
}

void read_all(std::FILE* f, void* data, size_t len, const std::string& path) {
    if (std::fread(data, 1, len, f) != len)
        throw IoError("checkpoint: short read from " + path);
}

// Concatenate the moment buffers for one parameter group. An optimizer that
// has not stepped yet holds no buffers; its moments are implicitly zero, so
// the block is zero-filled to the group's size.
std::vector<float> flatten_moments(const std::vector<std::vector<float>>& buffers,
                                   const std::vector<nn::NodeP<float>>& params) {
    size_t total = 0;
    for (const auto& p : params) total += p->value.data.size();
    if (buffers.empty()) return std::vector<float>(total, 0.0f);
    std::vector<float> out;
    out.reserve(total);
    for (const auto& b : buffers) out.insert(out.end(), b.begin(), b.end());
    if (out.size() != total)
        throw ValidationError("checkpoint: optimizer state does not match the parameter group");
    return out;
}

// Split a flat optimizer buffer back into per-parameter slices matching the
// given parameter group.
std::vector<std::vector<float>> unflatten(const std::vector<float>& flat,
                                          const std::vector<nn::NodeP<float>>& params) {
    std::vector<std::vector<float>> out;
    size_t off = 0;
    for (const auto& p : params) {
        size_t n = p->value.data.size();
        if (off + n > flat.size()) throw ValidationError("checkpoint: optimizer state truncated");
        out.emplace_back(flat.begin() + off, flat.begin() + off + n);
        off += n;
    }
    if (off != flat.size()) throw ValidationError("checkpoint: optimizer state size mismatch");
    return out;
}

nlohmann::json config_to_json(const NetConfig& c) {
    return {{"image_size", c.image_size},
            {"content_channels", c.content_channels},
            {"attr_dim", c.attr_dim},
            {"num_domains", c.num_domains},
            {"base_width", c.base_width},
            {"disc_width", c.disc_width},
            {"lr", c.lr},
            {"batch_size", c.batch_size},
            {"total_iters", c.total_iters},
            {"checkpoint_every", c.checkpoint_every},
            {"seed", c.seed}};
}

NetConfig config_from_json(const nlohmann::json& j) {
    NetConfig c;
    c.image_size = j.at("image_size").get<int>();
    c.content_channels = j.at("content_channels").get<int>();
    c.attr_dim = j.at("attr_dim").get<int>();
    c.num_domains = j.at("num_domains").get<int>();
    c.base_width = j.at("base_width").get<int>();
    c.disc_width = j.at("disc_width").get<int>();
    c.lr = j.at("lr").get<float>();
    c.batch_size = j.at("batch_size").get<int>();
    c.total_iters = j.at("total_iters").get<int>();
    c.checkpoint_every = j.at("checkpoint_every").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
    return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const GanModel<float>& model,
                     const LossWeights& weights, const nn::Adam<float>* opt_gen,
                     const nn::Adam<float>* opt_dis) {
    if ((opt_gen == nullptr) != (opt_dis == nullptr))
        throw ValidationError("checkpoint: provide both optimizers or neither");

    nlohmann::json header;
    header["config"] = config_to_json(model.config());
    header["weights"] = {{"w_cc", weights.w_cc},         {"w_c", weights.w_c},
                         {"w_d", weights.w_d},           {"w_recon", weights.w_recon},
                         {"w_latent", weights.w_latent}, {"w_kl", weights.w_kl}};
    header["step"] = model.step;

    std::vector<std::pair<std::string, const std::vector<float>*>> blocks;
    for (const auto& name : model.param_names())
        blocks.emplace_back(name, &model.param(name)->value.data);

    std::vector<float> gen_m, gen_v, dis_m, dis_v;
    bool with_opt = opt_gen != nullptr;
    header["optimizer"] = {{"present", with_opt},
                           {"t_gen", with_opt ? opt_gen->t : 0},
                           {"t_dis", with_opt ? opt_dis->t : 0}};
    if (with_opt) {
        auto gen_group = model.gen_params();
        auto dis_group = model.dis_params();
        gen_m = flatten_moments(opt_gen->m, gen_group);
        gen_v = flatten_moments(opt_gen->v, gen_group);
        dis_m = flatten_moments(opt_dis->m, dis_group);
        dis_v = flatten_moments(opt_dis->v, dis_group);
        blocks.emplace_back("opt_gen.m", &gen_m);
        blocks.emplace_back("opt_gen.v", &gen_v);
        blocks.emplace_back("opt_dis.m", &dis_m);
        blocks.emplace_back("opt_dis.v", &dis_v);
    }

    nlohmann::json table = nlohmann::json::array();
    for (const auto& [name, data] : blocks)
        table.push_back({{"name", name}, {"count", data->size()}});
    header["blocks"] = table;

    std::string json_text = header.dump();
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("checkpoint: cannot open " + path + " for writing");
    write_all(f.get(), kMagic, sizeof(kMagic), path);
    write_all(f.get(), &kVersion, sizeof(kVersion), path);
    uint64_t json_len = json_text.size();
    write_all(f.get(), &json_len, sizeof(json_len), path);
    write_all(f.get(), json_text.data(), json_text.size(), path);
    for (const auto& [name, data] : blocks)
        write_all(f.get(), data->data(), data->size() * sizeof(float), path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("checkpoint: cannot open " + path);
    char magic[8];
    read_all(f.get(), magic, sizeof(magic), path);
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ValidationError("checkpoint: bad magic in " + path);
    uint32_t version = 0;
    read_all(f.get(), &version, sizeof(version), path);
    if (version != kVersion)
        throw ValidationError("checkpoint: unsupported version in " + path);
    uint64_t json_len = 0;
    read_all(f.get(), &json_len, sizeof(json_len), path);
    if (json_len > (1ull << 30)) throw ValidationError("checkpoint: oversized header");
    std::string json_text(json_len, '\0');
    read_all(f.get(), json_text.data(), json_len, path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("checkpoint: corrupt header: ") + e.what());
    }

    LoadedCheckpoint out;
    NetConfig cfg = config_from_json(header.at("config"));
    const auto& jw = header.at("weights");
    out.weights.w_cc = jw.at("w_cc").get<float>();
    out.weights.w_c = jw.at("w_c").get<float>();
    out.weights.w_d = jw.at("w_d").get<float>();
    out.weights.w_recon = jw.at("w_recon").get<float>();
    out.weights.w_latent = jw.at("w_latent").get<float>();
    out.weights.w_kl = jw.at("w_kl").get<float>();
    out.model = std::make_shared<GanModel<float>>(cfg);
    out.model->step = header.at("step").get<int64_t>();

    std::vector<std::pair<std::string, std::vector<float>>> blocks;
    for (const auto& entry : header.at("blocks")) {
        std::string name = entry.at("name").get<std::string>();
        size_t count = entry.at("count").get<size_t>();
        std::vector<float> data(count);
        read_all(f.get(), data.data(), count * sizeof(float), path);
        blocks.emplace_back(std::move(name), std::move(data));
    }

    auto expected = out.model->param_names();
    size_t bi = 0;
    for (const auto& name : expected) {
        if (bi >= blocks.size() || blocks[bi].first != name)
            throw ValidationError("checkpoint: missing parameter block " + name);
        auto& target = out.model->param(name)->value.data;
        if (blocks[bi].second.size() != target.size())
            throw ValidationError("checkpoint: size mismatch for block " + name);
        target = std::move(blocks[bi].second);
        ++bi;
    }

    const auto& jopt = header.at("optimizer");
    out.has_optimizer = jopt.at("present").get<bool>();
    if (out.has_optimizer) {
        std::vector<std::vector<float>> opt_blocks;
        for (const char* name : {"opt_gen.m", "opt_gen.v", "opt_dis.m", "opt_dis.v"}) {
            if (bi >= blocks.size() || blocks[bi].first != name)
                throw ValidationError(std::string("checkpoint: missing block ") + name);
            opt_blocks.push_back(std::move(blocks[bi].second));
            ++bi;
        }
        auto gen_params = out.model->gen_params();
        auto dis_params = out.model->dis_params();
        out.opt_gen = std::make_shared<nn::Adam<float>>(cfg.lr);
        out.opt_dis = std::make_shared<nn::Adam<float>>(cfg.lr);
        out.opt_gen->t = jopt.at("t_gen").get<int64_t>();
        out.opt_dis->t = jopt.at("t_dis").get<int64_t>();
        out.opt_gen->m = unflatten(opt_blocks[0], gen_params);
        out.opt_gen->v = unflatten(opt_blocks[1], gen_params);
        out.opt_dis->m = unflatten(opt_blocks[2], dis_params);
        out.opt_dis->v = unflatten(opt_blocks[3], dis_params);
    }
    if (bi != blocks.size()) throw ValidationError("checkpoint: unexpected extra blocks");
    return out;
}

LoadedCheckpoint load_checkpoint_compatible(const std::string& path, const NetConfig& expected) {
    auto loaded = load_checkpoint(path);
    if (!loaded.model->config().same_architecture(expected))
        throw ValidationError("checkpoint: architecture does not match the requested config");
    return loaded;
}

}  // namespace nsaug::gan
