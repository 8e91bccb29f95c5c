#pragma once

#include <vector>

#include "nsaug/gan/model.hpp"
#include "nsaug/nn/ops.hpp"

namespace nsaug::gan {

// L1 reconstruction terms; aliases kept separate so call sites read like the
// objective they implement.
template <typename T>
nn::NodeP<T> recon_loss(const nn::NodeP<T>& a, const nn::NodeP<T>& b) {
    return nn::l1_loss(a, b);
}
template <typename T>
nn::NodeP<T> latent_recon_loss(const nn::NodeP<T>& z_random, const nn::NodeP<T>& z_back) {
    return nn::l1_loss(z_random, z_back);
}

// closed-form KL to the standard normal for a single code
template <typename T>
T kl_value(const std::vector<T>& mu, const std::vector<T>& logvar) {
    if (mu.size() != logvar.size()) throw ValidationError("kl: dim mismatch");
    T s = 0;
    for (size_t i = 0; i < mu.size(); ++i)
        s += std::exp(logvar[i]) + mu[i] * mu[i] - T(1) - logvar[i];
    return s / T(2);
}

template <typename T>
struct AdvPair {
    nn::NodeP<T> d_side;  // minimized by the discriminator
    nn::NodeP<T> g_side;  // minimized by the generator / encoder
};

// Content adversary: the classifier learns the source domain of a content
// code; the encoder is pushed toward the uniform distribution over domains,
// whose cross-entropy bottoms out at log K.
template <typename T>
AdvPair<T> content_adv_losses(const GanModel<T>& model, const nn::NodeP<T>& z_c,
                              const std::vector<int>& true_domains) {
    auto logits = model.disc_content(z_c);
    return {nn::softmax_ce_labels(logits, true_domains), nn::softmax_ce_uniform(logits)};
}

// Least-squares adversary on images, conditioned on the domain: real scores
// toward 1, fake toward 0, generator drives its output toward 1.
template <typename T>
AdvPair<T> domain_adv_losses(const GanModel<T>& model, const nn::NodeP<T>& real,
                             const nn::NodeP<T>& fake, const nn::Tensor<T>& domain) {
    auto d_real = model.disc_domain(real, domain);
    auto d_fake = model.disc_domain(fake, domain);
    auto d_side = nn::weighted_sum<T>(
        {{nn::mse_to_const(d_real, T(1)), T(0.5)}, {nn::mse_to_const(d_fake, T(0)), T(0.5)}});
    auto g_side = nn::mse_to_const(d_fake, T(1));
    return {d_side, g_side};
}

// The two-swap cycle, wiring injectable so the bookkeeping is testable with
// identity networks: enc_c(image) -> content, enc_a(image, domain) ->
// attribute, gen(content, attribute, domain) -> image. Each original's
// content must return home after the second swap.
template <typename T, typename EncC, typename EncA, typename Gen>
nn::NodeP<T> cross_cycle_core(EncC&& enc_c, EncA&& enc_a, Gen&& gen, const nn::NodeP<T>& xi,
                              const nn::NodeP<T>& xj, int di, int dj) {
    if (di == dj) throw ValidationError("cross_cycle: domains must differ");
    auto u = gen(enc_c(xj), enc_a(xi, di), di);  // content of x_j styled as domain i
    auto v = gen(enc_c(xi), enc_a(xj, dj), dj);  // content of x_i styled as domain j
    auto xi_hat = gen(enc_c(v), enc_a(u, di), di);
    auto xj_hat = gen(enc_c(u), enc_a(v, dj), dj);
    return nn::weighted_sum<T>(
        {{nn::l1_loss(xi_hat, xi), T(1)}, {nn::l1_loss(xj_hat, xj), T(1)}});
}

// Model-bound cross-cycle with deterministic attributes (eps = 0).
template <typename T>
nn::NodeP<T> cross_cycle_loss(const GanModel<T>& model, const nn::NodeP<T>& xi,
                              const nn::NodeP<T>& xj, int di, int dj) {
    int n = xi->value.dim(0);
    int k = model.config().num_domains;
    nn::Tensor<T> eps({n, model.config().attr_dim});
    auto enc_c = [&](const nn::NodeP<T>& x) { return model.encode_content(x); };
    auto enc_a = [&](const nn::NodeP<T>& x, int d) {
        return model.encode_attribute(x, one_hot<T>(std::vector<int>(n, d), k), eps).sample;
    };
    auto gen = [&](const nn::NodeP<T>& c, const nn::NodeP<T>& a, int d) {
        return model.generate(c, a, one_hot<T>(std::vector<int>(n, d), k));
    };
    return cross_cycle_core<T>(enc_c, enc_a, gen, xi, xj, di, dj);
}

template <typename T>
struct GanLossTerms {
    nn::NodeP<T> cc, c, d, recon, latent, kl;
};

template <typename T>
nn::NodeP<T> total_loss(const GanLossTerms<T>& t, const LossWeights& w) {
    w.validate();
    return nn::weighted_sum<T>({{t.cc, static_cast<T>(w.w_cc)},
                                {t.c, static_cast<T>(w.w_c)},
                                {t.d, static_cast<T>(w.w_d)},
                                {t.recon, static_cast<T>(w.w_recon)},
                                {t.latent, static_cast<T>(w.w_latent)},
                                {t.kl, static_cast<T>(w.w_kl)}});
}

}  // namespace nsaug::gan
