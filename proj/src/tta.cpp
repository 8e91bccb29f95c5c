#include "nsaug/tta.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <utility>

#include "nsaug/color.hpp"
#include "nsaug/metrics.hpp"

namespace nsaug {

void TtaConfig::validate() const {
    for (int k : rotations)
        if (k < 1 || k > 3)
            throw ValidationError("tta: rotation must be 1, 2, or 3 quarter turns");
    for (double s : scales)
        if (!(s > 0.0)) throw ValidationError("tta: scale factor must be positive");
    if (color_jitter_draws < 0) throw ValidationError("tta: negative jitter draw count");
    if (!(merge_iou_threshold > 0.0 && merge_iou_threshold < 1.0))
        throw ValidationError("tta: merge_iou_threshold must lie in (0,1)");
    if (!(vote_fraction > 0.0 && vote_fraction <= 1.0))
        throw ValidationError("tta: vote_fraction must lie in (0,1]");
}

int TtaConfig::num_runs() const {
    return 1 + static_cast<int>(rotations.size()) + (hflip ? 1 : 0) + (vflip ? 1 : 0) +
           static_cast<int>(scales.size()) + color_jitter_draws;
}

namespace {

struct Run {
    std::string name;
    std::function<Image(const Image&)> forward;
    std::function<Mask(const Mask&)> inverse;  // back to the original geometry
};

std::vector<Run> build_runs(const TtaConfig& cfg, int h, int w) {
    std::vector<Run> runs;
    auto id_mask = [](const Mask& m) { return m; };
    runs.push_back({"identity", [](const Image& im) { return im; }, id_mask});
    for (int k : cfg.rotations) {
        runs.push_back({"rot90x" + std::to_string(k),
                        [k](const Image& im) { return rot90(im, k); },
                        [k](const Mask& m) { return mask_rot90(m, 4 - k); }});
    }
    if (cfg.hflip)
        runs.push_back({"hflip", [](const Image& im) { return hflip(im); },
                        [](const Mask& m) { return mask_hflip(m); }});
    if (cfg.vflip)
        runs.push_back({"vflip", [](const Image& im) { return vflip(im); },
                        [](const Mask& m) { return mask_vflip(m); }});
    for (double s : cfg.scales) {
        const int sh = std::max(1, static_cast<int>(std::lround(h * s)));
        const int sw = std::max(1, static_cast<int>(std::lround(w * s)));
        runs.push_back({"scale" + format_double(s, 3),
                        [sh, sw](const Image& im) { return resize_bilinear(im, sh, sw); },
                        [h, w](const Mask& m) { return mask_resize_nearest(m, h, w); }});
    }
    for (int j = 0; j < cfg.color_jitter_draws; ++j) {
        RandomStream rng(mix_seed(cfg.seed, static_cast<uint64_t>(j)));
        const float fb = static_cast<float>(rng.uniform(0.8, 1.2));
        const float fc = static_cast<float>(rng.uniform(0.8, 1.2));
        const float fs = static_cast<float>(rng.uniform(0.8, 1.2));
        const float dh = static_cast<float>(rng.uniform(-0.05, 0.05));
        runs.push_back({"jitter" + std::to_string(j),
                        [fb, fc, fs, dh](const Image& im) {
                            return color_jitter(im, fb, fc, fs, dh);
                        },
                        id_mask});
    }
    return runs;
}

void validate_prediction(const Prediction& p, int h, int w, const std::string& context) {
    if (p.masks.height != h || p.masks.width != w)
        throw ValidationError(context + ": prediction shape " + std::to_string(p.masks.height) +
                              "x" + std::to_string(p.masks.width) + " does not match image " +
                              std::to_string(h) + "x" + std::to_string(w));
    try {
        p.masks.validate();
    } catch (const Error& e) {
        throw ValidationError(context + ": " + e.what());
    }
    if (p.confidence.size() != p.masks.instances.size())
        throw ValidationError(context + ": confidence count does not match instance count");
    for (double c : p.confidence)
        if (!(c >= 0.0 && c <= 1.0))
            throw ValidationError(context + ": confidence outside [0,1]");
}

}  // namespace

InstanceMaskSet tta_predict(const Predictor& predictor, const Image& image,
                            const TtaConfig& config) {
    config.validate();
    const int h = image.height, w = image.width;
    const std::vector<Run> runs = build_runs(config, h, w);
    const int num_runs = static_cast<int>(runs.size());

    struct Member {
        Mask mask;
        double conf;
        int run, idx;  // provenance, also the deterministic tie-break
    };
    std::vector<Member> members;
    for (int r = 0; r < num_runs; ++r) {
        const Image transformed = runs[r].forward(image);
        Prediction p = predictor(transformed);
        validate_prediction(p, transformed.height, transformed.width,
                            "tta transform " + runs[r].name);
        for (size_t i = 0; i < p.masks.instances.size(); ++i) {
            Mask back = runs[r].inverse(p.masks.instances[i]);
            if (back.none()) continue;  // vanished under the inverse rescale
            members.push_back({std::move(back), p.confidence[i], r, static_cast<int>(i)});
        }
    }

    std::sort(members.begin(), members.end(), [](const Member& a, const Member& b) {
        if (a.conf != b.conf) return a.conf > b.conf;
        if (a.run != b.run) return a.run < b.run;
        return a.idx < b.idx;
    });

    // Greedy clustering: the most confident unassigned member seeds a
    // cluster and pulls in everything sufficiently overlapping it.
    struct Cluster {
        Mask voted;
        double conf;
    };
    std::vector<Cluster> clusters;
    std::vector<char> assigned(members.size(), 0);
    for (size_t s = 0; s < members.size(); ++s) {
        if (assigned[s]) continue;
        std::vector<size_t> group{s};
        assigned[s] = 1;
        for (size_t j = s + 1; j < members.size(); ++j) {
            if (assigned[j]) continue;
            if (iou(members[j].mask, members[s].mask) >= config.merge_iou_threshold) {
                assigned[j] = 1;
                group.push_back(j);
            }
        }
        // pixel vote against the full run count, so support from only a few
        // transforms dies here
        std::vector<int> votes(static_cast<size_t>(h) * w, 0);
        double conf_sum = 0.0;
        for (size_t g : group) {
            const Mask& m = members[g].mask;
            for (size_t px = 0; px < m.data.size(); ++px) votes[px] += m.data[px] != 0;
            conf_sum += members[g].conf;
        }
        const double need = config.vote_fraction * num_runs;
        Mask voted(h, w);
        for (size_t px = 0; px < votes.size(); ++px)
            voted.data[px] = static_cast<double>(votes[px]) >= need ? 1 : 0;
        if (voted.none()) continue;
        clusters.push_back({std::move(voted), conf_sum / static_cast<double>(group.size())});
    }

    std::stable_sort(clusters.begin(), clusters.end(),
                     [](const Cluster& a, const Cluster& b) { return a.conf > b.conf; });

    // Disjointness by confidence order; overlap between clusters is routine
    // here, so pixels move quietly.
    InstanceMaskSet out(h, w);
    std::vector<char> taken(static_cast<size_t>(h) * w, 0);
    for (Cluster& c : clusters) {
        for (size_t px = 0; px < c.voted.data.size(); ++px) {
            if (c.voted.data[px] && taken[px]) c.voted.data[px] = 0;
        }
        if (c.voted.none()) continue;
        for (size_t px = 0; px < c.voted.data.size(); ++px)
            if (c.voted.data[px]) taken[px] = 1;
        out.instances.push_back(std::move(c.voted));
    }
    out.validate();
    return out;
}

ScoreReport score_corpus(const Predictor& predictor, const std::vector<LabeledSample>& samples,
                         const std::optional<TtaConfig>& tta) {
    if (samples.empty()) throw ValidationError("score_corpus: no samples");
    std::string missing;
    for (const auto& s : samples)
        if (!s.masks) missing += missing.empty() ? s.id : ", " + s.id;
    if (!missing.empty())
        throw ValidationError("score_corpus: samples without ground truth: " + missing);

    ScoreReport report;
    double sum = 0.0;
    for (const auto& s : samples) {
        InstanceMaskSet pred;
        if (tta) {
            pred = tta_predict(predictor, s.image, *tta);
        } else {
            Prediction p = predictor(s.image);
            validate_prediction(p, s.image.height, s.image.width, "predictor on " + s.id);
            pred = std::move(p.masks);
        }
        ScoreRow row;
        row.sample_id = s.id;
        row.map = dsb_map(pred, *s.masks);
        row.num_pred = static_cast<int>(pred.instances.size());
        row.num_gt = static_cast<int>(s.masks->instances.size());
        sum += row.map;
        report.rows.push_back(std::move(row));
    }
    report.mean_map = sum / static_cast<double>(report.rows.size());
    return report;
}

void write_score_csv(const std::string& path, const ScoreReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "sample_id,map,num_pred,num_gt\n";
    for (const auto& r : report.rows)
        out << r.sample_id << ',' << format_double(r.map) << ',' << r.num_pred << ','
            << r.num_gt << '\n';
    if (!out.good()) throw IoError("failed writing " + path);
}

}  // namespace nsaug
