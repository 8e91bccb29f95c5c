#include "nsaug/augment.hpp"

#include <cmath>
#include <utility>

#include "nsaug/color.hpp"
#include "nsaug/gan/trainer.hpp"
#include "nsaug/nn/ops.hpp"

namespace nsaug {

void AugmentPolicy::validate() const {
    if (!(style_prob >= 0.0 && style_prob <= 1.0))
        throw ValidationError("augment policy: style_prob must lie in [0,1]");
}

StyleAugmentResult style_augment(gan::GanModel<float>& model, const LabeledSample& in,
                                 RandomStream& rng, bool exclude_self_domain) {
    if (model.step <= 0) throw ValidationError("style_augment: model has no training steps");
    const gan::NetConfig& cfg = model.config();
    const int k = cfg.num_domains;

    LabeledSample fitted =
        (in.image.height == cfg.image_size && in.image.width == cfg.image_size)
            ? in
            : fit_sample(in, cfg.image_size);

    nn::Tensor<float> eps({1, cfg.attr_dim});
    for (auto& v : eps.data) v = static_cast<float>(rng.normal());

    int domain;
    if (exclude_self_domain) {
        if (!fitted.domain)
            throw ValidationError("style_augment: exclude_self_domain needs a labeled sample");
        const int self = *fitted.domain;
        if (self < 0 || self >= k)
            throw ValidationError("style_augment: sample domain out of range");
        if (k < 2)
            throw ValidationError("style_augment: cannot exclude the only domain");
        domain = rng.uniform_int(0, k - 2);
        if (domain >= self) ++domain;
    } else {
        domain = rng.uniform_int(0, k - 1);
    }

    auto x = nn::make_leaf(gan::image_to_tensor(fitted.image, cfg.image_size));
    auto z_c = model.encode_content(x);
    auto z_a = nn::make_leaf(eps);
    auto out = model.generate(z_c, z_a, gan::one_hot<float>({domain}, k));

    StyleAugmentResult res;
    res.domain_drawn = domain;
    res.sample.image = gan::tensor_to_image(out->value, 0);
    res.sample.masks = fitted.masks;  // untouched by construction
    res.sample.domain = domain;
    res.sample.id = fitted.id;
    return res;
}

LabeledSample standard_augment(const LabeledSample& in, const AugmentPolicy& policy,
                               RandomStream& rng) {
    policy.validate();
    LabeledSample out = in;

    if (policy.hflip && rng.bernoulli(0.5)) {
        out.image = nsaug::hflip(out.image);
        if (out.masks) out.masks = masks_hflip(*out.masks);
    }
    if (policy.vflip && rng.bernoulli(0.5)) {
        out.image = nsaug::vflip(out.image);
        if (out.masks) out.masks = masks_vflip(*out.masks);
    }
    if (policy.rot90) {
        const int turns = rng.uniform_int(0, 3);
        if (turns != 0) {
            out.image = nsaug::rot90(out.image, turns);
            if (out.masks) out.masks = masks_rot90(*out.masks, turns);
        }
    }
    if (policy.scale) {
        const float f = static_cast<float>(rng.uniform(0.8, 1.2));
        const int nh = std::max(1, static_cast<int>(std::lround(out.image.height * f)));
        const int nw = std::max(1, static_cast<int>(std::lround(out.image.width * f)));
        if (nh != out.image.height || nw != out.image.width) {
            out.image = resize_bilinear(out.image, nh, nw);
            if (out.masks) out.masks = masks_resize_nearest(*out.masks, nh, nw, "augment " + out.id);
        }
    }
    if (policy.color_jitter) {
        const float fb = static_cast<float>(rng.uniform(0.8, 1.2));
        const float fc = static_cast<float>(rng.uniform(0.8, 1.2));
        const float fs = static_cast<float>(rng.uniform(0.8, 1.2));
        const float dh = static_cast<float>(rng.uniform(-0.05, 0.05));
        out.image = color_jitter(std::move(out.image), fb, fc, fs, dh);
    }
    out.validate();
    return out;
}

std::vector<PolicyOutput> apply_policy(gan::GanModel<float>* model,
                                       const std::vector<LabeledSample>& batch,
                                       const AugmentPolicy& policy) {
    policy.validate();
    if (policy.style_prob > 0.0 && model == nullptr)
        throw ValidationError("apply_policy: style_prob > 0 needs a model");

    std::vector<PolicyOutput> out;
    out.reserve(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        const uint64_t salt = static_cast<uint64_t>(i);
        RandomStream rng(mix_seed(policy.seed, salt));
        PolicyOutput item;
        item.seed = salt;
        if (policy.style_prob > 0.0 && rng.bernoulli(policy.style_prob)) {
            StyleAugmentResult styled =
                style_augment(*model, batch[i], rng, policy.exclude_self_domain);
            item.styled = true;
            item.domain_drawn = styled.domain_drawn;
            item.sample = standard_augment(styled.sample, policy, rng);
        } else {
            item.sample = standard_augment(batch[i], policy, rng);
        }
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace nsaug
