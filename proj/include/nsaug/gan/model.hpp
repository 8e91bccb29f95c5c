#pragma once

#include <map>
#include <string>
#include <vector>

#include "nsaug/gan/config.hpp"
#include "nsaug/nn/graph.hpp"
#include "nsaug/nn/ops.hpp"
#include "nsaug/util.hpp"

namespace nsaug::gan {

// One-hot rows for a batch of domain labels.
template <typename T>
nn::Tensor<T> one_hot(const std::vector<int>& domains, int k) {
    nn::Tensor<T> t({static_cast<int>(domains.size()), k});
    for (size_t i = 0; i < domains.size(); ++i) {
        if (domains[i] < 0 || domains[i] >= k)
            throw ValidationError("one_hot: domain label out of range");
        t.data[i * k + domains[i]] = T(1);
    }
    return t;
}

template <typename T>
struct AttrOut {
    nn::NodeP<T> mu, logvar, sample;
    nn::Tensor<T> eps;
};

// The translation network: content encoder, attribute encoder, conditional
// generator, and the two discriminators, all over one shared parameter
// registry so a single model covers every domain. Forward methods build
// autodiff graphs; image batches are (N,3,S,S), domain batches (N,K) one-hot.
template <typename T>
class GanModel {
  public:
    explicit GanModel(const NetConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        RandomStream rng(mix_seed(cfg_.seed, 0x1417u));
        int cc = cfg_.content_channels, b = cfg_.base_width, dw = cfg_.disc_width;
        int k = cfg_.num_domains, da = cfg_.attr_dim;

        add_conv("ec.c1", b, 3, 3, rng);
        add_norm("ec.n1", b);
        add_conv("ec.c2", cc, b, 3, rng);
        add_norm("ec.n2", cc);
        for (int r = 0; r < 3; ++r) add_resblock("ec.r" + std::to_string(r), cc, rng);

        add_conv("ea.c1", b, 3 + k, 3, rng);
        add_conv("ea.c2", 2 * b, b, 3, rng);
        add_conv("ea.c3", 3 * b, 2 * b, 3, rng);
        add_conv("ea.c4", 4 * b, 3 * b, 3, rng);
        add_linear("ea.mu", da, 4 * b, rng);
        add_linear("ea.lv", da, 4 * b, rng);

        add_conv("g.merge", cc, cc + da + k, 1, rng);
        add_norm("g.mn", cc);
        for (int r = 0; r < 3; ++r) add_resblock("g.r" + std::to_string(r), cc, rng);
        add_conv("g.u1", b, cc, 3, rng);
        add_norm("g.un1", b);
        add_conv("g.u2", b / 2, b, 3, rng);
        add_norm("g.un2", b / 2);
        add_conv("g.out", 3, b / 2, 3, rng);

        add_conv("dd.c1", dw, 3 + k, 4, rng);
        add_conv("dd.c2", 2 * dw, dw, 4, rng);
        add_conv("dd.c3", 4 * dw, 2 * dw, 4, rng);
        add_conv("dd.head", 1, 4 * dw, 3, rng);

        add_conv("dc.c1", dw, cc, 3, rng);
        add_conv("dc.c2", dw, dw, 3, rng);
        add_linear("dc.fc", k, dw, rng);
    }

    const NetConfig& config() const { return cfg_; }
    int64_t step = 0;

    nn::NodeP<T>& param(const std::string& name) {
        auto it = params_.find(name);
        if (it == params_.end()) throw ValidationError("model: unknown parameter " + name);
        return it->second;
    }
    const nn::NodeP<T>& param(const std::string& name) const {
        auto it = params_.find(name);
        if (it == params_.end()) throw ValidationError("model: unknown parameter " + name);
        return it->second;
    }

    std::vector<std::string> param_names() const {
        std::vector<std::string> out;
        for (const auto& [name, node] : params_) out.push_back(name);
        return out;
    }
    std::vector<nn::NodeP<T>> gen_params() const { return group({"ec.", "ea.", "g."}); }
    std::vector<nn::NodeP<T>> dis_params() const { return group({"dd.", "dc."}); }
    std::vector<nn::NodeP<T>> all_params() const { return group({""}); }

    // ---- forwards ----

    // (N,3,S,S) -> (N, C_c, S/4, S/4)
    nn::NodeP<T> encode_content(const nn::NodeP<T>& image) const {
        check_image(image);
        auto x = nn::leaky_relu(in("ec.n1", conv("ec.c1", image, 2, 1)));
        x = nn::leaky_relu(in("ec.n2", conv("ec.c2", x, 2, 1)));
        for (int r = 0; r < 3; ++r) x = resblock("ec.r" + std::to_string(r), x);
        return x;
    }

    // image + broadcast one-hot -> (mu, logvar, sample); eps is (N, attr_dim)
    AttrOut<T> encode_attribute(const nn::NodeP<T>& image, const nn::Tensor<T>& domain,
                                const nn::Tensor<T>& eps) const {
        check_image(image);
        check_domain(domain, image->value.dim(0));
        if (eps.shape != std::vector<int>{image->value.dim(0), cfg_.attr_dim})
            throw ValidationError("encode_attribute: eps shape mismatch");
        auto dom = nn::broadcast_planes(nn::make_leaf(nn::Tensor<T>(domain)), cfg_.image_size,
                                        cfg_.image_size);
        auto x = nn::concat_channels<T>({image, dom});
        x = nn::leaky_relu(conv("ea.c1", x, 2, 1));
        x = nn::leaky_relu(conv("ea.c2", x, 2, 1));
        x = nn::leaky_relu(conv("ea.c3", x, 2, 1));
        x = nn::leaky_relu(conv("ea.c4", x, 2, 1));
        auto pooled = nn::global_avg_pool(x);
        AttrOut<T> out;
        out.mu = nn::linear(pooled, param("ea.mu.w"), param("ea.mu.b"));
        out.logvar = nn::linear(pooled, param("ea.lv.w"), param("ea.lv.b"));
        out.sample = nn::reparam_sample(out.mu, out.logvar, eps);
        out.eps = eps;
        return out;
    }

    // content (N,C_c,S/4,S/4) + attribute (N,d_a) + domain -> image in [0,1]
    nn::NodeP<T> generate(const nn::NodeP<T>& z_c, const nn::NodeP<T>& z_a,
                          const nn::Tensor<T>& domain) const {
        int s4 = cfg_.image_size / 4;
        if (z_c->value.shape !=
            std::vector<int>{z_c->value.dim(0), cfg_.content_channels, s4, s4})
            throw ValidationError("generate: content shape mismatch");
        int n = z_c->value.dim(0);
        if (z_a->value.shape != std::vector<int>{n, cfg_.attr_dim})
            throw ValidationError("generate: attribute shape mismatch");
        check_domain(domain, n);
        auto za = nn::broadcast_planes(z_a, s4, s4);
        auto dom = nn::broadcast_planes(nn::make_leaf(nn::Tensor<T>(domain)), s4, s4);
        auto x = nn::concat_channels<T>({z_c, za, dom});
        x = nn::leaky_relu(in("g.mn", conv("g.merge", x, 1, 0)));
        for (int r = 0; r < 3; ++r) x = resblock("g.r" + std::to_string(r), x);
        x = nn::upsample_nearest2(x);
        x = nn::leaky_relu(in("g.un1", conv("g.u1", x, 1, 1)));
        x = nn::upsample_nearest2(x);
        x = nn::leaky_relu(in("g.un2", conv("g.u2", x, 1, 1)));
        return nn::tanh01(conv("g.out", x, 1, 1));
    }

    // conditional patch discriminator: (N,1,S/8,S/8) logits
    nn::NodeP<T> disc_domain(const nn::NodeP<T>& image, const nn::Tensor<T>& domain) const {
        check_image(image);
        check_domain(domain, image->value.dim(0));
        auto dom = nn::broadcast_planes(nn::make_leaf(nn::Tensor<T>(domain)), cfg_.image_size,
                                        cfg_.image_size);
        auto x = nn::concat_channels<T>({image, dom});
        x = nn::leaky_relu(conv("dd.c1", x, 2, 1));
        x = nn::leaky_relu(conv("dd.c2", x, 2, 1));
        x = nn::leaky_relu(conv("dd.c3", x, 2, 1));
        return conv("dd.head", x, 1, 1);
    }

    // domain classifier over content codes: (N,K) logits
    nn::NodeP<T> disc_content(const nn::NodeP<T>& z_c) const {
        int s4 = cfg_.image_size / 4;
        if (z_c->value.shape !=
            std::vector<int>{z_c->value.dim(0), cfg_.content_channels, s4, s4})
            throw ValidationError("disc_content: content shape mismatch");
        auto x = nn::leaky_relu(conv("dc.c1", z_c, 2, 1));
        x = nn::leaky_relu(conv("dc.c2", x, 2, 1));
        return nn::linear(nn::global_avg_pool(x), param("dc.fc.w"), param("dc.fc.b"));
    }

  private:
    NetConfig cfg_;
    std::map<std::string, nn::NodeP<T>> params_;

    void add_param(const std::string& name, nn::Tensor<T> t) {
        params_.emplace(name, nn::make_leaf(std::move(t), true));
    }
    void add_conv(const std::string& prefix, int cout, int cin, int k, RandomStream& rng) {
        nn::Tensor<T> w({cout, cin, k, k});
        T std = std::sqrt(T(2) / static_cast<T>(cin * k * k));
        for (auto& v : w.data) v = static_cast<T>(rng.normal()) * std;
        add_param(prefix + ".w", std::move(w));
        add_param(prefix + ".b", nn::Tensor<T>({cout}));
    }
    void add_linear(const std::string& prefix, int dout, int din, RandomStream& rng) {
        nn::Tensor<T> w({dout, din});
        T std = std::sqrt(T(2) / static_cast<T>(din));
        for (auto& v : w.data) v = static_cast<T>(rng.normal()) * std;
        add_param(prefix + ".w", std::move(w));
        add_param(prefix + ".b", nn::Tensor<T>({dout}));
    }
    void add_norm(const std::string& prefix, int c) {
        nn::Tensor<T> g({c});
        for (auto& v : g.data) v = T(1);
        add_param(prefix + ".g", std::move(g));
        add_param(prefix + ".b", nn::Tensor<T>({c}));
    }
    void add_resblock(const std::string& prefix, int c, RandomStream& rng) {
        add_conv(prefix + ".c1", c, c, 3, rng);
        add_norm(prefix + ".n1", c);
        add_conv(prefix + ".c2", c, c, 3, rng);
        add_norm(prefix + ".n2", c);
    }

    std::vector<nn::NodeP<T>> group(const std::vector<std::string>& prefixes) const {
        std::vector<nn::NodeP<T>> out;
        for (const auto& [name, node] : params_) {
            for (const auto& p : prefixes) {
                if (name.rfind(p, 0) == 0) {
                    out.push_back(node);
                    break;
                }
            }
        }
        return out;
    }

    nn::NodeP<T> conv(const std::string& prefix, const nn::NodeP<T>& x, int stride,
                      int pad) const {
        return nn::conv2d(x, param(prefix + ".w"), param(prefix + ".b"), stride, pad);
    }
    nn::NodeP<T> in(const std::string& prefix, const nn::NodeP<T>& x) const {
        return nn::instance_norm(x, param(prefix + ".g"), param(prefix + ".b"));
    }
    nn::NodeP<T> resblock(const std::string& prefix, const nn::NodeP<T>& x) const {
        auto h = nn::leaky_relu(in(prefix + ".n1", conv(prefix + ".c1", x, 1, 1)));
        h = in(prefix + ".n2", conv(prefix + ".c2", h, 1, 1));
        return nn::add(x, h);
    }

    void check_image(const nn::NodeP<T>& image) const {
        const auto& s = image->value.shape;
        if (s.size() != 4 || s[1] != 3 || s[2] != cfg_.image_size || s[3] != cfg_.image_size)
            throw ValidationError("model: image batch shape mismatch");
    }
    void check_domain(const nn::Tensor<T>& domain, int n) const {
        if (domain.shape != std::vector<int>{n, cfg_.num_domains})
            throw ValidationError("model: domain batch shape mismatch");
        for (int i = 0; i < n; ++i) {
            int ones = 0;
            for (int j = 0; j < cfg_.num_domains; ++j) {
                T v = domain.data[static_cast<size_t>(i) * cfg_.num_domains + j];
                if (v == T(1))
                    ++ones;
                else if (v != T(0))
                    throw ValidationError("model: domain vector must be one-hot");
            }
            if (ones != 1) throw ValidationError("model: domain vector must be one-hot");
        }
    }
};

}  // namespace nsaug::gan
