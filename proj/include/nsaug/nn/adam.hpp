#pragma once

#include <cmath>
#include <vector>

#include "nsaug/nn/graph.hpp"

namespace nsaug::nn {

// Adam with bias correction. Moment buffers are exposed so checkpoints can
// serialize optimizer state alongside the parameters they belong to; `step`
// expects the same parameter list, in the same order, every call.
template <typename T>
struct Adam {
    T lr;
    T beta1 = T(0.5);
    T beta2 = T(0.999);
    T eps = T(1e-8);
    int64_t t = 0;
    std::vector<std::vector<T>> m, v;

    explicit Adam(T lr_) : lr(lr_) {}

    void step(const std::vector<NodeP<T>>& params) {
        if (m.empty()) {
            for (const auto& p : params) {
                m.emplace_back(p->value.data.size(), T(0));
                v.emplace_back(p->value.data.size(), T(0));
            }
        }
        if (m.size() != params.size()) throw ValidationError("adam: parameter list changed");
        ++t;
        T bc1 = T(1) - std::pow(beta1, static_cast<T>(t));
        T bc2 = T(1) - std::pow(beta2, static_cast<T>(t));
        for (size_t i = 0; i < params.size(); ++i) {
            auto& p = params[i];
            if (p->grad.data.size() != p->value.data.size())
                throw ValidationError("adam: missing gradient");
            if (m[i].size() != p->value.data.size())
                throw ValidationError("adam: state size mismatch");
            for (size_t k = 0; k < p->value.data.size(); ++k) {
                T g = p->grad.data[k];
                m[i][k] = beta1 * m[i][k] + (T(1) - beta1) * g;
                v[i][k] = beta2 * v[i][k] + (T(1) - beta2) * g * g;
                T mhat = m[i][k] / bc1;
                T vhat = v[i][k] / bc2;
                p->value.data[k] -= lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }
};

}  // namespace nsaug::nn
