#pragma once

#include <array>
#include <utility>
#include <vector>

#include "nsaug/features.hpp"

namespace nsaug {

// Top-2 principal axes of mean-centered features.
struct PcaModel {
    std::vector<double> mean;
    std::array<std::vector<double>, 2> components;  // orthonormal rows
    std::array<double, 2> explained_variance = {0.0, 0.0};  // descending

    void validate() const;
};

// Eigendecomposition of the sample covariance. Requires >= 3 samples and
// nonzero total variance. Component signs are fixed so the entry with the
// largest magnitude is positive.
PcaModel fit_pca(const std::vector<HsvFeature>& features);

std::pair<double, double> project(const PcaModel& model, const HsvFeature& feature);

}  // namespace nsaug
