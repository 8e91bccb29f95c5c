#include "nsaug/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "nsaug/dsb_io.hpp"

namespace nsaug {

std::vector<DomainStyle> default_domain_styles() {
    return {
        // fluorescence: near-black background, bright green nuclei
        {{0.02f, 0.03f, 0.05f}, {0.15f, 0.85f, 0.35f}, 0.02f, 0.6f},
        // stained tissue: pale pink background, purple nuclei
        {{0.92f, 0.80f, 0.86f}, {0.45f, 0.15f, 0.50f}, 0.03f, 0.8f},
        // bright-field gray
        {{0.75f, 0.74f, 0.71f}, {0.28f, 0.24f, 0.21f}, 0.04f, 1.0f},
        // DAPI-like blue on dark
        {{0.03f, 0.04f, 0.10f}, {0.25f, 0.38f, 0.95f}, 0.02f, 0.5f},
        // IHC-like brown on cream
        {{0.91f, 0.88f, 0.80f}, {0.55f, 0.32f, 0.12f}, 0.03f, 0.7f},
        // dark-field red
        {{0.10f, 0.03f, 0.03f}, {0.95f, 0.40f, 0.28f}, 0.05f, 0.4f},
    };
}

void SynthCorpusConfig::validate() const {
    if (num_domains < 2) throw ValidationError("synth: num_domains must be >= 2");
    if (image_size < 32) throw ValidationError("synth: image_size must be >= 32");
    if (images_per_domain < 1) throw ValidationError("synth: images_per_domain must be >= 1");
    if (nuclei_min < 1 || nuclei_max < nuclei_min)
        throw ValidationError("synth: empty nuclei count range");
    if (radius_min < 1.f || radius_max < radius_min)
        throw ValidationError("synth: empty radius range");
    if (radius_max * 2 + 2 > static_cast<float>(image_size))
        throw ValidationError("synth: radius too large for image size");
    if (!styles.empty() && static_cast<int>(styles.size()) < num_domains)
        throw ValidationError("synth: fewer styles than domains");
}

namespace {

// Fraction of the pixel covered by the disc, on a 4x4 subsample grid.
float pixel_coverage(const DiscLayout::Disc& d, int y, int x) {
    int inside = 0;
    for (int sy = 0; sy < 4; ++sy) {
        for (int sx = 0; sx < 4; ++sx) {
            float py = y + (sy + 0.5f) / 4.f;
            float px = x + (sx + 0.5f) / 4.f;
            float dy = py - d.cy;
            float dx = px - d.cx;
            if (dy * dy + dx * dx <= d.r * d.r) ++inside;
        }
    }
    return inside / 16.f;
}

void gaussian_blur_inplace(Image& img, float sigma) {
    if (sigma <= 0.f) return;
    int radius = std::max(1, static_cast<int>(std::ceil(3.f * sigma)));
    std::vector<float> kernel(2 * radius + 1);
    float sum = 0.f;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5f * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (float& k : kernel) k /= sum;

    auto reflect = [](int i, int n) {
        if (n == 1) return 0;
        int period = 2 * n - 2;
        i = ((i % period) + period) % period;
        return i < n ? i : period - i;
    };

    Image tmp(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                float acc = 0.f;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[i + radius] * img.at(y, reflect(x + i, img.width), c);
                }
                tmp.at(y, x, c) = acc;
            }
        }
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                float acc = 0.f;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[i + radius] * tmp.at(reflect(y + i, img.height), x, c);
                }
                img.at(y, x, c) = acc;
            }
        }
    }
}

}  // namespace

Image render_layout(const DiscLayout& layout, const DomainStyle& style, int size,
                    const RenderOptions& opts, RandomStream& noise_rng) {
    Image img = Image::filled(size, size, style.background[0], style.background[1],
                              style.background[2]);
    for (const auto& disc : layout.discs) {
        int y0 = std::max(0, static_cast<int>(std::floor(disc.cy - disc.r - 1)));
        int y1 = std::min(size - 1, static_cast<int>(std::ceil(disc.cy + disc.r + 1)));
        int x0 = std::max(0, static_cast<int>(std::floor(disc.cx - disc.r - 1)));
        int x1 = std::min(size - 1, static_cast<int>(std::ceil(disc.cx + disc.r + 1)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                float cov = pixel_coverage(disc, y, x);
                if (!opts.antialias) cov = cov >= 0.5f ? 1.f : 0.f;
                if (cov <= 0.f) continue;
                for (int c = 0; c < 3; ++c) {
                    img.at(y, x, c) =
                        img.at(y, x, c) * (1.f - cov) + style.foreground[c] * cov;
                }
            }
        }
    }
    if (opts.apply_blur) gaussian_blur_inplace(img, style.blur_sigma);
    if (opts.apply_noise && style.noise_amp > 0.f) {
        for (float& v : img.data) {
            v += static_cast<float>(noise_rng.uniform(-style.noise_amp, style.noise_amp));
        }
    }
    return clamp01(std::move(img));
}

Mask disc_mask(const DiscLayout::Disc& disc, int size) {
    Mask m(size, size);
    int y0 = std::max(0, static_cast<int>(std::floor(disc.cy - disc.r - 1)));
    int y1 = std::min(size - 1, static_cast<int>(std::ceil(disc.cy + disc.r + 1)));
    int x0 = std::max(0, static_cast<int>(std::floor(disc.cx - disc.r - 1)));
    int x1 = std::min(size - 1, static_cast<int>(std::ceil(disc.cx + disc.r + 1)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (pixel_coverage(disc, y, x) >= 0.5f) m.at(y, x) = 1;
        }
    }
    return m;
}

std::vector<SynthSample> generate_synth_corpus(const SynthCorpusConfig& config) {
    config.validate();
    std::vector<DomainStyle> styles = config.styles.empty() ? default_domain_styles()
                                                            : config.styles;
    while (static_cast<int>(styles.size()) < config.num_domains) {
        // cycle presets if more domains than presets were requested
        styles.push_back(styles[styles.size() % default_domain_styles().size()]);
    }

    std::vector<SynthSample> corpus;
    corpus.reserve(static_cast<size_t>(config.num_domains) * config.images_per_domain);
    for (int d = 0; d < config.num_domains; ++d) {
        for (int i = 0; i < config.images_per_domain; ++i) {
            uint64_t salt = static_cast<uint64_t>(d) * 1000000ull + static_cast<uint64_t>(i);
            RandomStream layout_rng = RandomStream(config.seed).fork(salt * 2);
            RandomStream noise_rng = RandomStream(config.seed).fork(salt * 2 + 1);

            DiscLayout layout;
            layout.requested = layout_rng.uniform_int(config.nuclei_min, config.nuclei_max);
            const float margin = 1.f;
            for (int n = 0; n < layout.requested; ++n) {
                bool placed = false;
                for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
                    DiscLayout::Disc cand;
                    cand.r = static_cast<float>(
                        layout_rng.uniform(config.radius_min, config.radius_max));
                    cand.cx = static_cast<float>(layout_rng.uniform(
                        cand.r + margin, config.image_size - cand.r - margin));
                    cand.cy = static_cast<float>(layout_rng.uniform(
                        cand.r + margin, config.image_size - cand.r - margin));
                    bool clear = true;
                    for (const auto& other : layout.discs) {
                        float dy = cand.cy - other.cy;
                        float dx = cand.cx - other.cx;
                        float min_dist = cand.r + other.r + 1.f;
                        if (dy * dy + dx * dx < min_dist * min_dist) {
                            clear = false;
                            break;
                        }
                    }
                    if (clear) {
                        layout.discs.push_back(cand);
                        placed = true;
                    }
                }
                if (!placed) break;  // give up on the remaining discs
            }
            if (static_cast<int>(layout.discs.size()) < layout.requested) {
                warn("synth d" + std::to_string(d) + "_" + std::to_string(i) + ": placed " +
                     std::to_string(layout.discs.size()) + " of " +
                     std::to_string(layout.requested) + " nuclei");
            }

            SynthSample s;
            s.layout = layout;
            s.sample.id = "d" + std::to_string(d) + "_" +
                          (i < 10 ? "0" : "") + std::to_string(i);
            s.sample.domain = d;
            s.sample.image = render_layout(layout, styles[d], config.image_size, RenderOptions{},
                                           noise_rng);
            InstanceMaskSet masks(config.image_size, config.image_size);
            for (const auto& disc : layout.discs) {
                Mask m = disc_mask(disc, config.image_size);
                if (!m.none()) masks.instances.push_back(std::move(m));
            }
            masks.validate();
            s.sample.masks = std::move(masks);
            corpus.push_back(std::move(s));
        }
    }
    return corpus;
}

void write_synth_corpus(const std::string& root, const std::vector<SynthSample>& corpus) {
    std::filesystem::create_directories(root);
    std::vector<std::pair<std::string, int>> rows;
    for (const auto& s : corpus) {
        write_sample(root, s.sample);
        rows.emplace_back(s.sample.id, *s.sample.domain);
    }
    write_domains_csv((std::filesystem::path(root) / "domains.csv").string(), rows);
}

}  // namespace nsaug
