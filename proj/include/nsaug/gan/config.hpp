#pragma once

#include <cstdint>

#include "nsaug/util.hpp"

namespace nsaug::gan {

// Architecture and training hyperparameters for the translation model. The
// spatial contract is fixed: content codes live at 1/4 resolution, so
// image_size must be divisible by 4.
struct NetConfig {
    int image_size = 64;
    int content_channels = 64;  // channels of the content code
    int attr_dim = 8;           // attribute vector length
    int num_domains = 2;
    int base_width = 32;   // encoder/generator trunk width; must be even
    int disc_width = 32;   // discriminator first-layer width
    float lr = 1e-4f;
    int batch_size = 8;
    int total_iters = 2000;
    int checkpoint_every = 500;
    uint64_t seed = 0;

    void validate() const {
        if (image_size < 8 || image_size % 4 != 0)
            throw ValidationError("config: image_size must be >= 8 and divisible by 4");
        if (num_domains < 2) throw ValidationError("config: need at least 2 domains");
        if (content_channels < 1) throw ValidationError("config: content_channels < 1");
        if (attr_dim < 1) throw ValidationError("config: attr_dim < 1");
        if (base_width < 2 || base_width % 2 != 0)
            throw ValidationError("config: base_width must be even and >= 2");
        if (disc_width < 1) throw ValidationError("config: disc_width < 1");
        if (!(lr > 0)) throw ValidationError("config: lr must be positive");
        if (batch_size < 1) throw ValidationError("config: batch_size < 1");
        if (total_iters < 0) throw ValidationError("config: total_iters < 0");
        if (checkpoint_every < 1) throw ValidationError("config: checkpoint_every < 1");
    }

    bool same_architecture(const NetConfig& o) const {
        return image_size == o.image_size && content_channels == o.content_channels &&
               attr_dim == o.attr_dim && num_domains == o.num_domains &&
               base_width == o.base_width && disc_width == o.disc_width;
    }
};

// Sized so a CPU-only training run finishes in minutes.
inline NetConfig toy_config() {
    NetConfig c;
    c.image_size = 64;
    c.content_channels = 24;
    c.attr_dim = 8;
    c.base_width = 16;
    c.disc_width = 24;
    c.batch_size = 8;
    c.total_iters = 2000;
    return c;
}

// Full-size setting for real microscopy crops.
inline NetConfig paper_config() {
    NetConfig c;
    c.image_size = 216;
    c.content_channels = 64;
    c.attr_dim = 8;
    c.base_width = 64;
    c.disc_width = 64;
    c.batch_size = 2;
    c.total_iters = 100000;
    c.checkpoint_every = 5000;
    return c;
}

struct LossWeights {
    float w_cc = 10.0f;
    float w_c = 1.0f;
    float w_d = 1.0f;
    float w_recon = 10.0f;
    float w_latent = 10.0f;
    float w_kl = 0.01f;

    void validate() const {
        if (w_cc < 0 || w_c < 0 || w_d < 0 || w_recon < 0 || w_latent < 0 || w_kl < 0)
            throw ValidationError("loss weights must be nonnegative");
    }
};

}  // namespace nsaug::gan
