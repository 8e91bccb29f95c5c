#pragma once

#include <cstdint>
#include <vector>

#include "nsaug/gan/model.hpp"
#include "nsaug/sample.hpp"
#include "nsaug/util.hpp"

namespace nsaug {

/// Controls one augmentation pass. Every draw in the pass flows from `seed`
/// (one derived stream per sample), so equal seeds give equal epochs.
struct AugmentPolicy {
    double style_prob = 0.5;
    bool hflip = true;
    bool vflip = true;
    bool rot90 = true;
    bool scale = true;
    bool color_jitter = true;
    /// When set, the drawn style domain is never the sample's own domain;
    /// requires every styled sample to carry a domain label.
    bool exclude_self_domain = false;
    uint64_t seed = 0;

    void validate() const;
};

struct StyleAugmentResult {
    LabeledSample sample;
    int domain_drawn = -1;
};

/// Re-style one sample: keep its content code, draw a fresh attribute vector
/// and a target domain, decode. The output image comes from the generator at
/// the model's native size; the masks are the input's masks, byte for byte
/// (fitted to the model size first when the input is larger or smaller).
/// Draw order on `rng`: attr_dim normals, then one domain index.
/// The model must have at least one training step.
StyleAugmentResult style_augment(gan::GanModel<float>& model, const LabeledSample& in,
                                 RandomStream& rng, bool exclude_self_domain = false);

/// Geometric and photometric augmentation. Geometric ops hit image and masks
/// identically (nearest neighbor on masks); color jitter touches only the
/// image. Draws happen in a fixed order, only for ops the policy enables:
/// hflip coin, vflip coin, rotation count, scale factor, then brightness,
/// contrast, saturation, hue. An instance emptied by rescaling is dropped
/// with a warning.
LabeledSample standard_augment(const LabeledSample& in, const AugmentPolicy& policy,
                               RandomStream& rng);

struct PolicyOutput {
    LabeledSample sample;
    bool styled = false;
    int domain_drawn = -1;  // -1 when not styled
    uint64_t seed = 0;      // the per-sample stream salt
};

/// Full policy over a batch: every sample gets the standard ops; each one is
/// independently styled first with probability style_prob. Per-sample stream
/// = policy.seed salted with the batch index; within it the style coin is
/// drawn first. `model` may be null only when style_prob is zero.
std::vector<PolicyOutput> apply_policy(gan::GanModel<float>* model,
                                       const std::vector<LabeledSample>& batch,
                                       const AugmentPolicy& policy);

}  // namespace nsaug
