#include "nsaug/gan/trainer.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <utility>

#include "nsaug/nn/ops.hpp"
#include "nsaug/util.hpp"

namespace nsaug::gan {

namespace {

using nn::NodeP;
using nn::Tensor;

// Copy sample 0 of a (1,C,H,W) tensor into slot `b` of a (B,C,H,W) batch.
void copy_into_batch(Tensor<float>& batch, int b, const Tensor<float>& src) {
    const int64_t per = src.numel();
    std::copy(src.data.begin(), src.data.end(), batch.data.begin() + b * per);
}

Tensor<float> draw_normal(RandomStream& rng, int rows, int cols) {
    Tensor<float> t({rows, cols});
    for (auto& v : t.data) v = static_cast<float>(rng.normal());
    return t;
}

bool all_finite(std::initializer_list<float> vals) {
    for (float v : vals)
        if (!std::isfinite(v)) return false;
    return true;
}

float scalar(const NodeP<float>& n) { return n->value.data[0]; }

}  // namespace

nn::Tensor<float> image_to_tensor(const Image& img, int size) {
    Image fitted = fit_to(img, size, size);
    Tensor<float> t({1, 3, size, size});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                t.data[(static_cast<size_t>(c) * size + y) * size + x] = fitted.at(y, x, c);
    return t;
}

Image tensor_to_image(const nn::Tensor<float>& t, int n) {
    if (t.shape.size() != 4 || t.shape[1] != 3)
        throw ValidationError("tensor_to_image: expected (N,3,H,W)");
    if (n < 0 || n >= t.shape[0]) throw ValidationError("tensor_to_image: sample index out of range");
    const int h = static_cast<int>(t.shape[2]), w = static_cast<int>(t.shape[3]);
    Image img(h, w);
    const size_t base = static_cast<size_t>(n) * 3 * h * w;
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                img.at(y, x, c) = t.data[base + (static_cast<size_t>(c) * h + y) * w + x];
    return clamp01(std::move(img));
}

TrainResult train(const std::vector<TrainItem>& corpus, const NetConfig& config,
                  const LossWeights& weights, const TrainOptions& opts) {
    config.validate();
    weights.validate();
    if (opts.out_dir.empty()) throw ValidationError("train: out_dir is required");
    if (corpus.empty()) throw ValidationError("train: corpus is empty");

    const int S = config.image_size;
    const int B = config.batch_size;
    const int K = config.num_domains;
    const int A = config.attr_dim;

    // Bucket corpus indices by domain; cross-domain translation needs at
    // least two populated domains.
    std::vector<std::vector<int>> by_domain(K);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const int d = corpus[i].domain;
        if (d < 0 || d >= K)
            throw ValidationError("train: item " + std::to_string(i) + " has domain " +
                                  std::to_string(d) + " outside [0," + std::to_string(K) + ")");
        by_domain[d].push_back(static_cast<int>(i));
    }
    std::vector<int> populated;
    for (int d = 0; d < K; ++d)
        if (!by_domain[d].empty()) populated.push_back(d);
    if (populated.size() < 2)
        throw ValidationError("train: corpus covers " + std::to_string(populated.size()) +
                              " domain(s); at least 2 are required");

    std::vector<Tensor<float>> prepared;
    prepared.reserve(corpus.size());
    for (const auto& item : corpus) prepared.push_back(image_to_tensor(item.image, S));

    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("train: cannot create output directory " + opts.out_dir + ": " + ec.message());

    std::shared_ptr<GanModel<float>> model;
    std::shared_ptr<nn::Adam<float>> opt_gen, opt_dis;
    if (!opts.resume_from.empty()) {
        LoadedCheckpoint loaded = load_checkpoint_compatible(opts.resume_from, config);
        // the current run's schedule governs, so rebuild on `config` and move
        // the restored state across (same architecture, same parameter set)
        model = std::make_shared<GanModel<float>>(config);
        for (const auto& name : model->param_names())
            model->param(name)->value.data = loaded.model->param(name)->value.data;
        model->step = loaded.model->step;
        if (loaded.has_optimizer) {
            opt_gen = loaded.opt_gen;
            opt_dis = loaded.opt_dis;
        }
    } else {
        model = std::make_shared<GanModel<float>>(config);
    }
    if (!opt_gen) opt_gen = std::make_shared<nn::Adam<float>>(config.lr);
    if (!opt_dis) opt_dis = std::make_shared<nn::Adam<float>>(config.lr);

    const std::vector<NodeP<float>> gen_params = model->gen_params();
    const std::vector<NodeP<float>> dis_params = model->dis_params();

    const std::string log_path = opts.out_dir + "/losses.csv";
    bool append = false;
    if (!opts.resume_from.empty()) {
        std::error_code sec;
        append = std::filesystem::exists(log_path, sec) && std::filesystem::file_size(log_path, sec) > 0;
    }
    std::ofstream log(log_path, append ? std::ios::app : std::ios::trunc);
    if (!log) throw IoError("train: cannot open " + log_path + " for writing");
    if (!append) log << "step,L_cc,L_c,L_d,L_recon,L_latent,L_KL,L_total_G,L_total_D\n";

    const Tensor<float> zero_eps({B, A});

    auto save_with_state = [&](const std::string& path) {
        save_checkpoint(path, *model, weights, opt_gen.get(), opt_dis.get());
    };
    auto abort_nonfinite = [&](int64_t step_index) {
        const std::string path = opts.out_dir + "/emergency.ckpt";
        save_with_state(path);
        throw NumericalError("train: non-finite loss at step " + std::to_string(step_index) +
                             "; state saved to " + path);
    };

    const int M = static_cast<int>(populated.size());
    for (int64_t s = model->step; s < config.total_iters; ++s) {
        RandomStream rng(mix_seed(config.seed, static_cast<uint64_t>(s)));

        // Sample B ordered cross-domain pairs plus one image per side.
        Tensor<float> xi_t({B, 3, S, S}), xj_t({B, 3, S, S});
        std::vector<int> lab_i(B), lab_j(B);
        for (int b = 0; b < B; ++b) {
            const int pi = static_cast<int>(rng.uniform_int(0, M - 1));
            int pj = static_cast<int>(rng.uniform_int(0, M - 2));
            if (pj >= pi) ++pj;
            lab_i[b] = populated[pi];
            lab_j[b] = populated[pj];
            const auto& pool_i = by_domain[lab_i[b]];
            const auto& pool_j = by_domain[lab_j[b]];
            copy_into_batch(xi_t, b,
                            prepared[pool_i[rng.uniform_int(0, static_cast<int>(pool_i.size()) - 1)]]);
            copy_into_batch(xj_t, b,
                            prepared[pool_j[rng.uniform_int(0, static_cast<int>(pool_j.size()) - 1)]]);
        }
        const Tensor<float> eps_i = draw_normal(rng, B, A);
        const Tensor<float> eps_j = draw_normal(rng, B, A);
        const Tensor<float> eps_u = draw_normal(rng, B, A);
        const Tensor<float> eps_v = draw_normal(rng, B, A);
        const Tensor<float> z_rand_t = draw_normal(rng, B, A);

        const Tensor<float> dom_i = one_hot<float>(lab_i, K);
        const Tensor<float> dom_j = one_hot<float>(lab_j, K);

        auto xi = nn::make_leaf(xi_t);
        auto xj = nn::make_leaf(xj_t);

        float v_total_d;
        {
            // Discriminator phase: real images and detached translations.
            auto ci_d = nn::detach(model->encode_content(xi));
            auto cj_d = nn::detach(model->encode_content(xj));
            auto ai_d = nn::detach(model->encode_attribute(xi, dom_i, eps_i).sample);
            auto aj_d = nn::detach(model->encode_attribute(xj, dom_j, eps_j).sample);
            auto u_d = nn::detach(model->generate(cj_d, ai_d, dom_i));
            auto v_d = nn::detach(model->generate(ci_d, aj_d, dom_j));

            auto l_d_D = nn::weighted_sum<float>(
                {{nn::mse_to_const(model->disc_domain(xi, dom_i), 1.0f), 0.25f},
                 {nn::mse_to_const(model->disc_domain(xj, dom_j), 1.0f), 0.25f},
                 {nn::mse_to_const(model->disc_domain(u_d, dom_i), 0.0f), 0.25f},
                 {nn::mse_to_const(model->disc_domain(v_d, dom_j), 0.0f), 0.25f}});
            auto l_c_D = nn::weighted_sum<float>(
                {{nn::softmax_ce_labels(model->disc_content(ci_d), lab_i), 0.5f},
                 {nn::softmax_ce_labels(model->disc_content(cj_d), lab_j), 0.5f}});
            auto d_total = nn::weighted_sum<float>({{l_d_D, weights.w_d}, {l_c_D, weights.w_c}});

            v_total_d = scalar(d_total);
            if (!all_finite({scalar(l_d_D), scalar(l_c_D), v_total_d})) abort_nonfinite(s + 1);
            nn::backward(d_total);
            opt_dis->step(dis_params);
        }

        // Generator phase on a fresh graph (the discriminator just moved).
        auto ci = model->encode_content(xi);
        auto cj = model->encode_content(xj);
        auto ai = model->encode_attribute(xi, dom_i, eps_i);
        auto aj = model->encode_attribute(xj, dom_j, eps_j);

        auto rec_i = model->generate(ci, ai.sample, dom_i);
        auto rec_j = model->generate(cj, aj.sample, dom_j);
        auto l_recon = nn::weighted_sum<float>(
            {{nn::l1_loss(rec_i, xi), 0.5f}, {nn::l1_loss(rec_j, xj), 0.5f}});

        auto u = model->generate(cj, ai.sample, dom_i);
        auto v = model->generate(ci, aj.sample, dom_j);
        auto cu = model->encode_content(u);
        auto cv = model->encode_content(v);
        auto au = model->encode_attribute(u, dom_i, eps_u);
        auto av = model->encode_attribute(v, dom_j, eps_v);
        auto xi_hat = model->generate(cv, au.sample, dom_i);
        auto xj_hat = model->generate(cu, av.sample, dom_j);
        auto l_cc = nn::add(nn::l1_loss(xi_hat, xi), nn::l1_loss(xj_hat, xj));

        auto l_c = nn::weighted_sum<float>(
            {{nn::softmax_ce_uniform(model->disc_content(ci)), 0.5f},
             {nn::softmax_ce_uniform(model->disc_content(cj)), 0.5f}});
        auto l_d = nn::weighted_sum<float>(
            {{nn::mse_to_const(model->disc_domain(u, dom_i), 1.0f), 0.5f},
             {nn::mse_to_const(model->disc_domain(v, dom_j), 1.0f), 0.5f}});

        auto z_rand = nn::make_leaf(z_rand_t);
        auto w_img = model->generate(cj, z_rand, dom_i);
        auto z_back = model->encode_attribute(w_img, dom_i, zero_eps).mu;
        auto l_latent = nn::l1_loss(z_back, z_rand);

        auto l_kl = nn::weighted_sum<float>(
            {{nn::kl_std_normal(ai.mu, ai.logvar), 0.5f}, {nn::kl_std_normal(aj.mu, aj.logvar), 0.5f}});

        GanLossTerms<float> terms{l_cc, l_c, l_d, l_recon, l_latent, l_kl};
        auto g_total = total_loss(terms, weights);

        const float v_cc = scalar(l_cc), v_c = scalar(l_c), v_d = scalar(l_d);
        const float v_recon = scalar(l_recon), v_latent = scalar(l_latent), v_kl = scalar(l_kl);
        const float v_total_g = scalar(g_total);
        if (!all_finite({v_cc, v_c, v_d, v_recon, v_latent, v_kl, v_total_g})) abort_nonfinite(s + 1);

        nn::backward(g_total);
        opt_gen->step(gen_params);

        model->step = s + 1;
        log << (s + 1) << ',' << format_double(v_cc) << ',' << format_double(v_c) << ','
            << format_double(v_d) << ',' << format_double(v_recon) << ',' << format_double(v_latent)
            << ',' << format_double(v_kl) << ',' << format_double(v_total_g) << ','
            << format_double(v_total_d) << '\n';
        log.flush();

        if (config.checkpoint_every > 0 && (s + 1) % config.checkpoint_every == 0 &&
            s + 1 < config.total_iters)
            save_with_state(opts.out_dir + "/ckpt_" + std::to_string(s + 1) + ".ckpt");
        if (opts.progress_every > 0 && (s + 1) % opts.progress_every == 0)
            warn("train: step " + std::to_string(s + 1) + "/" + std::to_string(config.total_iters) +
                 " G=" + format_double(v_total_g, 4) + " D=" + format_double(v_total_d, 4));
    }

    const std::string final_path = opts.out_dir + "/final.ckpt";
    save_with_state(final_path);
    if (!log) throw IoError("train: failed writing " + log_path);
    return TrainResult{model, opt_gen, opt_dis, final_path, log_path};
}

}  // namespace nsaug::gan
