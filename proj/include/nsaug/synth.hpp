#pragma once

#include <array>
#include <string>
#include <vector>

#include "nsaug/sample.hpp"
#include "nsaug/util.hpp"

namespace nsaug {

// Appearance of one domain. Domains share the nucleus-placement distribution
// and differ only in these style knobs, so content and style are separable
// by construction.
struct DomainStyle {
    std::array<float, 3> background{0.f, 0.f, 0.f};
    std::array<float, 3> foreground{1.f, 1.f, 1.f};
    float noise_amp = 0.02f;   // additive uniform noise in [-amp, amp]
    float blur_sigma = 0.6f;   // Gaussian blur applied before noise; 0 disables
};

// Six visually distinct presets (dark fluorescence-like through bright
// stained-tissue-like looks).
std::vector<DomainStyle> default_domain_styles();

struct SynthCorpusConfig {
    int num_domains = 6;
    int images_per_domain = 50;
    int image_size = 64;
    int nuclei_min = 4;
    int nuclei_max = 12;
    float radius_min = 3.f;
    float radius_max = 8.f;
    std::vector<DomainStyle> styles;  // empty -> default_domain_styles()
    uint64_t seed = 0;

    void validate() const;
};

struct DiscLayout {
    struct Disc {
        float cx, cy, r;
    };
    std::vector<Disc> discs;
    int requested = 0;  // discs asked for; discs.size() may be smaller
};

struct SynthSample {
    LabeledSample sample;
    DiscLayout layout;
};

struct RenderOptions {
    bool antialias = true;  // false: hard coverage >= 0.5 edges
    bool apply_blur = true;
    bool apply_noise = true;
};

// Renders layout+style to an image; noise draws come from `noise_rng`.
Image render_layout(const DiscLayout& layout, const DomainStyle& style, int size,
                    const RenderOptions& opts, RandomStream& noise_rng);

// The mask of one disc: pixels with >= 50% area coverage.
Mask disc_mask(const DiscLayout::Disc& disc, int size);

// Deterministic given config.seed. Samples are ordered domain-major, ids are
// "d<domain>_<index>". When non-overlapping placement fails after bounded
// retries the nucleus count is reduced (warning; layout.requested records the
// original ask).
std::vector<SynthSample> generate_synth_corpus(const SynthCorpusConfig& config);

// Writes samples + domains.csv in the DSB layout.
void write_synth_corpus(const std::string& root, const std::vector<SynthSample>& corpus);

}  // namespace nsaug
