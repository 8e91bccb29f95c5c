#include "nsaug/pca.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nsaug/util.hpp"

namespace nsaug {

void PcaModel::validate() const {
    const size_t d = mean.size();
    if (components[0].size() != d || components[1].size() != d)
        throw ValidationError("pca: component dimension mismatch");
    double n0 = 0.0, n1 = 0.0, dot = 0.0;
    for (size_t i = 0; i < d; ++i) {
        n0 += components[0][i] * components[0][i];
        n1 += components[1][i] * components[1][i];
        dot += components[0][i] * components[1][i];
    }
    if (std::abs(n0 - 1.0) > 1e-6 || std::abs(n1 - 1.0) > 1e-6 || std::abs(dot) > 1e-6)
        throw ValidationError("pca: components not orthonormal");
    if (explained_variance[0] < explained_variance[1] || explained_variance[1] < 0.0)
        throw ValidationError("pca: explained variances not descending nonnegative");
}

PcaModel fit_pca(const std::vector<HsvFeature>& features) {
    const size_t n = features.size();
    if (n < 3) throw ValidationError("pca: need at least 3 samples");
    const size_t d = features[0].size();
    for (const auto& f : features)
        if (f.size() != d) throw ValidationError("pca: ragged features");

    Eigen::MatrixXd X(n, d);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j) X(i, j) = features[i][j];
    Eigen::RowVectorXd mean = X.colwise().mean();
    X.rowwise() -= mean;

    Eigen::MatrixXd cov = X.transpose() * X / static_cast<double>(n - 1);
    if (cov.trace() <= 1e-15) throw ValidationError("pca: zero-variance data");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericalError("pca: eigensolver failed");

    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + d);
    // eigenvalues come back ascending
    for (int comp = 0; comp < 2; ++comp) {
        int col = static_cast<int>(d) - 1 - comp;
        Eigen::VectorXd v = solver.eigenvectors().col(col);
        int argmax = 0;
        for (int j = 1; j < v.size(); ++j)
            if (std::abs(v(j)) > std::abs(v(argmax))) argmax = j;
        if (v(argmax) < 0.0) v = -v;
        model.components[comp].assign(v.data(), v.data() + d);
        model.explained_variance[comp] = std::max(0.0, solver.eigenvalues()(col));
    }
    model.validate();
    return model;
}

std::pair<double, double> project(const PcaModel& model, const HsvFeature& feature) {
    if (feature.size() != model.mean.size()) throw ValidationError("pca: dimension mismatch");
    double x = 0.0, y = 0.0;
    for (size_t i = 0; i < feature.size(); ++i) {
        double c = feature[i] - model.mean[i];
        x += model.components[0][i] * c;
        y += model.components[1][i] * c;
    }
    return {x, y};
}

}  // namespace nsaug
