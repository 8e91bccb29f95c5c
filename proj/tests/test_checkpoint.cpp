#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "nsaug/gan/checkpoint.hpp"
#include "nsaug/gan/losses.hpp"
#include "nsaug/gan/model.hpp"
#include "nsaug/gan/trainer.hpp"
#include "nsaug/nn/ops.hpp"
#include "nsaug/util.hpp"

using namespace nsaug;
using namespace nsaug::gan;
namespace fs = std::filesystem;

namespace {

NetConfig mini_config(uint64_t seed) {
    NetConfig cfg;
    cfg.image_size = 8;
    cfg.content_channels = 4;
    cfg.attr_dim = 3;
    cfg.num_domains = 2;
    cfg.base_width = 4;
    cfg.disc_width = 4;
    cfg.batch_size = 2;
    cfg.total_iters = 4;
    cfg.checkpoint_every = 2;
    cfg.seed = seed;
    return cfg;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

nn::Tensor<float> random_batch(const NetConfig& cfg, uint64_t salt) {
    RandomStream rng(mix_seed(cfg.seed, salt));
    nn::Tensor<float> t({cfg.batch_size, 3, cfg.image_size, cfg.image_size});
    for (auto& v : t.data) v = static_cast<float>(rng.uniform());
    return t;
}

// A forward pass exercising every submodule, reduced to raw output buffers.
std::vector<std::vector<float>> probe_outputs(GanModel<float>& model, const NetConfig& cfg) {
    auto x = nn::make_leaf(random_batch(cfg, 99));
    std::vector<int> labels(cfg.batch_size, 1);
    auto dom = one_hot<float>(labels, cfg.num_domains);
    nn::Tensor<float> eps({cfg.batch_size, cfg.attr_dim});
    RandomStream rng(mix_seed(cfg.seed, 7));
    for (auto& v : eps.data) v = static_cast<float>(rng.normal());

    auto zc = model.encode_content(x);
    auto attr = model.encode_attribute(x, dom, eps);
    auto gen = model.generate(zc, attr.sample, dom);
    auto patch = model.disc_domain(gen, dom);
    auto logits = model.disc_content(zc);
    return {zc->value.data, attr.mu->value.data, attr.logvar->value.data,
            gen->value.data, patch->value.data, logits->value.data};
}

// One optimizer step on each group so moment buffers become nonzero.
void advance_one_step(GanModel<float>& model) {
    const NetConfig cfg = model.config();
    auto x = nn::make_leaf(random_batch(cfg, 55));
    std::vector<int> labels(cfg.batch_size, 0);
    auto dom = one_hot<float>(labels, cfg.num_domains);
    nn::Tensor<float> eps({cfg.batch_size, cfg.attr_dim});

    nn::Adam<float> og(1e-3f), od(1e-3f);
    {
        auto attr = model.encode_attribute(x, dom, eps);
        auto gen = model.generate(model.encode_content(x), attr.sample, dom);
        auto loss = nn::l1_loss(gen, x);
        nn::backward(loss);
        og.step(model.gen_params());
    }
    {
        auto loss = nn::add(nn::mse_to_const(model.disc_domain(x, dom), 1.0f),
                            nn::softmax_ce_labels(model.disc_content(
                                                      nn::detach(model.encode_content(x))),
                                                  labels));
        nn::backward(loss);
        od.step(model.dis_params());
    }
    model.step = 1;
}

}  // namespace

TEST_CASE("checkpoint round trip preserves everything bit-exactly") {
    fs::path dir = fresh_dir("nsaug_ckpt_roundtrip");
    NetConfig cfg = mini_config(21);
    LossWeights w;
    w.w_cc = 7.5;
    w.w_kl = 0.25;

    GanModel<float> model(cfg);
    model.step = 17;
    auto before = probe_outputs(model, cfg);

    const std::string p1 = (dir / "a.ckpt").string();
    save_checkpoint(p1, model, w);

    LoadedCheckpoint loaded = load_checkpoint(p1);
    CHECK(loaded.model->step == 17);
    CHECK(!loaded.has_optimizer);
    CHECK(loaded.weights.w_cc == doctest::Approx(7.5));
    CHECK(loaded.weights.w_kl == doctest::Approx(0.25));
    CHECK(loaded.model->config().image_size == cfg.image_size);
    CHECK(loaded.model->config().num_domains == cfg.num_domains);
    CHECK(loaded.model->config().seed == cfg.seed);

    // every parameter identical
    REQUIRE(loaded.model->param_names() == model.param_names());
    for (const auto& name : model.param_names())
        CHECK(loaded.model->param(name)->value.data == model.param(name)->value.data);

    auto after = probe_outputs(*loaded.model, cfg);
    REQUIRE(after.size() == before.size());
    for (size_t i = 0; i < before.size(); ++i) CHECK(after[i] == before[i]);

    // save -> load -> save produces identical bytes
    const std::string p2 = (dir / "b.ckpt").string();
    save_checkpoint(p2, *loaded.model, loaded.weights);
    CHECK(hash_file(p1) == hash_file(p2));
    fs::remove_all(dir);
}

TEST_CASE("checkpoint optimizer state round trip") {
    fs::path dir = fresh_dir("nsaug_ckpt_opt");
    NetConfig cfg = mini_config(3);

    GanModel<float> model(cfg);
    nn::Adam<float> og(cfg.lr), od(cfg.lr);
    // populate moments with two real steps
    for (int s = 0; s < 2; ++s) {
        auto x = nn::make_leaf(random_batch(cfg, 100 + static_cast<uint64_t>(s)));
        std::vector<int> labels(cfg.batch_size, 0);
        auto dom = one_hot<float>(labels, cfg.num_domains);
        nn::Tensor<float> eps({cfg.batch_size, cfg.attr_dim});
        auto attr = model.encode_attribute(x, dom, eps);
        auto gen = model.generate(model.encode_content(x), attr.sample, dom);
        nn::backward(nn::l1_loss(gen, x));
        og.step(model.gen_params());
        auto dl = nn::add(nn::mse_to_const(model.disc_domain(x, dom), 1.0f),
                          nn::softmax_ce_labels(
                              model.disc_content(nn::detach(model.encode_content(x))), labels));
        nn::backward(dl);
        od.step(model.dis_params());
    }
    model.step = 2;

    const std::string p1 = (dir / "o.ckpt").string();
    save_checkpoint(p1, model, LossWeights{}, &og, &od);

    LoadedCheckpoint loaded = load_checkpoint(p1);
    REQUIRE(loaded.has_optimizer);
    REQUIRE(loaded.opt_gen);
    REQUIRE(loaded.opt_dis);
    CHECK(loaded.opt_gen->t == 2);
    CHECK(loaded.opt_dis->t == 2);
    REQUIRE(loaded.opt_gen->m.size() == og.m.size());
    for (size_t i = 0; i < og.m.size(); ++i) {
        CHECK(loaded.opt_gen->m[i] == og.m[i]);
        CHECK(loaded.opt_gen->v[i] == og.v[i]);
    }
    REQUIRE(loaded.opt_dis->m.size() == od.m.size());
    for (size_t i = 0; i < od.m.size(); ++i) {
        CHECK(loaded.opt_dis->m[i] == od.m[i]);
        CHECK(loaded.opt_dis->v[i] == od.v[i]);
    }

    // a further identical step from restored state matches the original
    auto x = nn::make_leaf(random_batch(cfg, 300));
    std::vector<int> labels(cfg.batch_size, 1);
    auto dom = one_hot<float>(labels, cfg.num_domains);
    nn::Tensor<float> eps({cfg.batch_size, cfg.attr_dim});
    auto run_step = [&](GanModel<float>& mdl, nn::Adam<float>& opt) {
        auto attr = mdl.encode_attribute(x, dom, eps);
        auto gen = mdl.generate(mdl.encode_content(x), attr.sample, dom);
        nn::backward(nn::l1_loss(gen, x));
        opt.step(mdl.gen_params());
    };
    run_step(model, og);
    run_step(*loaded.model, *loaded.opt_gen);
    for (const auto& name : model.param_names())
        CHECK(loaded.model->param(name)->value.data == model.param(name)->value.data);
    fs::remove_all(dir);
}

TEST_CASE("checkpoint rejects corruption") {
    fs::path dir = fresh_dir("nsaug_ckpt_corrupt");
    NetConfig cfg = mini_config(5);
    GanModel<float> model(cfg);
    const std::string good = (dir / "good.ckpt").string();
    save_checkpoint(good, model, LossWeights{});

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_checkpoint((dir / "absent.ckpt").string()), IoError);
    }
    SUBCASE("bad magic") {
        std::ifstream in(good, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
        in.close();
        bytes[0] ^= 0x40;
        const std::string bad = (dir / "bad_magic.ckpt").string();
        std::ofstream(bad, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        CHECK_THROWS_AS(load_checkpoint(bad), ValidationError);
    }
    SUBCASE("truncated payload") {
        std::ifstream in(good, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
        in.close();
        bytes.resize(bytes.size() / 2);
        const std::string bad = (dir / "trunc.ckpt").string();
        std::ofstream(bad, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        CHECK_THROWS_AS(load_checkpoint(bad), Error);
    }
    fs::remove_all(dir);
}

TEST_CASE("checkpoint architecture compatibility check") {
    fs::path dir = fresh_dir("nsaug_ckpt_compat");
    NetConfig cfg = mini_config(9);
    GanModel<float> model(cfg);
    const std::string path = (dir / "m.ckpt").string();
    save_checkpoint(path, model, LossWeights{});

    // schedule fields may differ freely
    NetConfig sched = cfg;
    sched.total_iters = 999;
    sched.checkpoint_every = 7;
    sched.lr = 5e-4f;
    sched.batch_size = 4;
    CHECK_NOTHROW(load_checkpoint_compatible(path, sched));

    NetConfig arch = cfg;
    arch.base_width = 8;
    CHECK_THROWS_AS(load_checkpoint_compatible(path, arch), ValidationError);
    arch = cfg;
    arch.num_domains = 3;
    CHECK_THROWS_AS(load_checkpoint_compatible(path, arch), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("checkpoint state advances identically after save and restore") {
    fs::path dir = fresh_dir("nsaug_ckpt_advance");
    NetConfig cfg = mini_config(12);
    GanModel<float> model(cfg);
    advance_one_step(model);
    const std::string path = (dir / "s.ckpt").string();
    save_checkpoint(path, model, LossWeights{});
    LoadedCheckpoint loaded = load_checkpoint(path);
    CHECK(loaded.model->step == 1);
    auto a = probe_outputs(model, cfg);
    auto b = probe_outputs(*loaded.model, cfg);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    fs::remove_all(dir);
}
