#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "nsaug/util.hpp"

namespace nsaug::nn {

// Dense row-major tensor. Shapes used here are (N,C,H,W) for feature maps
// and (N,D) for vectors; ops document what they expect.
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(static_cast<size_t>(numel_of(shape)), T(0));
    }
    Tensor(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (static_cast<int64_t>(data.size()) != numel_of(shape))
            throw ValidationError("tensor: data size does not match shape");
    }

    static int64_t numel_of(const std::vector<int>& s) {
        int64_t n = 1;
        for (int d : s) {
            if (d <= 0) throw ValidationError("tensor: nonpositive dimension");
            n *= d;
        }
        return n;
    }

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }
};

}  // namespace nsaug::nn
