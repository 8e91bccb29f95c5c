#include "nsaug/report.hpp"

#include <algorithm>
#include <cmath>

#include "nsaug/gan/trainer.hpp"
#include "nsaug/nn/ops.hpp"

namespace nsaug {

std::array<float, 3> label_color(int label) {
    static const std::array<std::array<float, 3>, 8> palette = {{
        {0.89f, 0.10f, 0.11f},
        {0.22f, 0.49f, 0.72f},
        {0.30f, 0.69f, 0.29f},
        {1.00f, 0.50f, 0.00f},
        {0.60f, 0.31f, 0.64f},
        {0.65f, 0.34f, 0.16f},
        {0.97f, 0.51f, 0.75f},
        {0.40f, 0.40f, 0.40f},
    }};
    const int m = static_cast<int>(palette.size());
    int i = label % m;
    if (i < 0) i += m;
    return palette[static_cast<size_t>(i)];
}

Image make_grid(const std::vector<Image>& cells, int cols, int cell_size, int pad) {
    if (cells.empty()) throw ValidationError("make_grid: no cells");
    if (cols < 1 || cell_size < 1 || pad < 0)
        throw ValidationError("make_grid: bad layout parameters");
    const int rows = static_cast<int>((cells.size() + cols - 1) / static_cast<size_t>(cols));
    const int stride = cell_size + pad;
    Image canvas(rows * stride + pad, cols * stride + pad);
    for (auto& v : canvas.data) v = 0.93f;
    for (size_t i = 0; i < cells.size(); ++i) {
        cells[i].validate();
        Image cell = (cells[i].height == cell_size && cells[i].width == cell_size)
                         ? cells[i]
                         : resize_bilinear(cells[i], cell_size, cell_size);
        const int r = static_cast<int>(i) / cols, c = static_cast<int>(i) % cols;
        const int oy = pad + r * stride, ox = pad + c * stride;
        for (int y = 0; y < cell_size; ++y)
            for (int x = 0; x < cell_size; ++x)
                for (int ch = 0; ch < 3; ++ch)
                    canvas.at(oy + y, ox + x, ch) = cell.at(y, x, ch);
    }
    return canvas;
}

Image scatter_plot(const std::vector<std::array<double, 2>>& points,
                   const std::vector<int>& labels, int size) {
    if (points.empty()) throw ValidationError("scatter_plot: no points");
    if (labels.size() != points.size())
        throw ValidationError("scatter_plot: one label per point required");
    if (size < 16) throw ValidationError("scatter_plot: size too small");

    double xmin = points[0][0], xmax = xmin, ymin = points[0][1], ymax = ymin;
    for (const auto& p : points) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    double xspan = xmax - xmin, yspan = ymax - ymin;
    if (xspan <= 0) {
        xmin -= 0.5;
        xspan = 1.0;
    }
    if (yspan <= 0) {
        ymin -= 0.5;
        yspan = 1.0;
    }
    const double margin = 0.08;
    xmin -= xspan * margin;
    xspan *= 1 + 2 * margin;
    ymin -= yspan * margin;
    yspan *= 1 + 2 * margin;

    Image canvas(size, size);
    for (auto& v : canvas.data) v = 1.0f;
    for (size_t i = 0; i < points.size(); ++i) {
        const double tx = (points[i][0] - xmin) / xspan;
        const double ty = (points[i][1] - ymin) / yspan;
        const int cx = static_cast<int>(std::lround(tx * (size - 1)));
        const int cy = static_cast<int>(std::lround((1.0 - ty) * (size - 1)));
        const std::array<float, 3> col = label_color(labels[i]);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int y = cy + dy, x = cx + dx;
                if (y < 0 || y >= size || x < 0 || x >= size) continue;
                for (int c = 0; c < 3; ++c) canvas.at(y, x, c) = col[static_cast<size_t>(c)];
            }
        }
    }
    return canvas;
}

Image style_transfer_grid(gan::GanModel<float>& model, const std::vector<LabeledSample>& sources,
                          uint64_t seed) {
    if (model.step <= 0) throw ValidationError("style grid: model has no training steps");
    if (sources.empty()) throw ValidationError("style grid: no source samples");
    const gan::NetConfig& cfg = model.config();
    const int k = cfg.num_domains;
    const int s = cfg.image_size;

    std::vector<Image> cells;
    cells.reserve(sources.size() * static_cast<size_t>(k + 1));
    for (size_t i = 0; i < sources.size(); ++i) {
        if (!sources[i].domain || *sources[i].domain < 0 || *sources[i].domain >= k)
            throw ValidationError("style grid: source " + sources[i].id +
                                  " needs an in-range domain label");
        const int own = *sources[i].domain;
        LabeledSample fitted = (sources[i].image.height == s && sources[i].image.width == s)
                                   ? sources[i]
                                   : fit_sample(sources[i], s);
        cells.push_back(fitted.image);

        auto x = nn::make_leaf(gan::image_to_tensor(fitted.image, s));
        auto z_c = model.encode_content(x);
        nn::Tensor<float> zero_eps({1, cfg.attr_dim});
        for (int t = 0; t < k; ++t) {
            nn::NodeP<float> z_a;
            if (t == own) {
                z_a = model.encode_attribute(x, gan::one_hot<float>({own}, k), zero_eps).mu;
            } else {
                nn::Tensor<float> draw({1, cfg.attr_dim});
                RandomStream rng(mix_seed(seed, i * static_cast<size_t>(k) + t));
                for (auto& v : draw.data) v = static_cast<float>(rng.normal());
                z_a = nn::make_leaf(draw);
            }
            auto out = model.generate(z_c, z_a, gan::one_hot<float>({t}, k));
            cells.push_back(gan::tensor_to_image(out->value, 0));
        }
    }
    return make_grid(cells, k + 1, s);
}

std::vector<size_t> pick_exemplars(const std::vector<LabeledSample>& samples,
                                   const std::vector<int>& assignments, int k) {
    if (assignments.size() != samples.size())
        throw ValidationError("pick_exemplars: one assignment per sample required");
    std::vector<size_t> out;
    for (int label = 0; label < k; ++label) {
        for (size_t i = 0; i < samples.size(); ++i) {
            if (assignments[i] == label) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

}  // namespace nsaug
