#include "shapkit/blackbox.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace shapkit {

std::vector<double> predict_batch(const BlackBoxModel& model, const Matrix& batch) {
    return model.predict(batch);
}

std::vector<double> LinearModel::predict(const Matrix& batch) const {
    check_batch(batch);
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& row : batch) {
        double y = intercept_;
        for (std::size_t i = 0; i < row.size(); ++i) y += coefficients_[i] * row[i];
        out.push_back(y);
    }
    return out;
}

std::vector<double> FunctionModel::predict(const Matrix& batch) const {
    check_batch(batch);
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& row : batch) out.push_back(fn_(row));
    return out;
}

namespace {

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return d2;
}

}  // namespace

RbfKernelClassifier::RbfKernelClassifier(Matrix support_points,
                                         std::vector<double> dual_weights, double gamma)
    : support_points_(std::move(support_points)),
      dual_weights_(std::move(dual_weights)),
      gamma_(gamma) {
    if (support_points_.empty()) throw std::invalid_argument("RbfKernelClassifier: no support points");
    if (support_points_.size() != dual_weights_.size())
        throw std::invalid_argument("RbfKernelClassifier: weight/point count mismatch");
    if (gamma_ <= 0.0) throw std::invalid_argument("RbfKernelClassifier: gamma must be > 0");
}

std::size_t RbfKernelClassifier::feature_count() const {
    return support_points_.front().size();
}

std::vector<double> RbfKernelClassifier::predict(const Matrix& batch) const {
    check_batch(batch);
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& row : batch) {
        double score = 0.0;
        for (std::size_t j = 0; j < support_points_.size(); ++j) {
            score += dual_weights_[j] * std::exp(-gamma_ * squared_distance(row, support_points_[j]));
        }
        out.push_back(score);
    }
    return out;
}

double RbfKernelClassifier::training_accuracy(const Dataset& data) const {
    if (!data.labels) throw std::invalid_argument("training_accuracy: dataset has no labels");
    auto scores = predict(data.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double predicted = scores[i] > 0.5 ? 1.0 : 0.0;
        if (predicted == (*data.labels)[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

RbfKernelClassifier train_rbf_classifier(const Dataset& data, double gamma, double lambda) {
    if (data.rows() < 2) throw std::invalid_argument("train_rbf_classifier: need >= 2 instances");
    if (!data.labels) throw std::invalid_argument("train_rbf_classifier: dataset has no labels");
    if (gamma <= 0.0) throw std::invalid_argument("train_rbf_classifier: gamma must be > 0");
    if (lambda <= 0.0)
        throw std::invalid_argument("train_rbf_classifier: lambda must be > 0 (kernel system may be singular)");
    for (double y : *data.labels) {
        if (y != 0.0 && y != 1.0)
            throw std::invalid_argument("train_rbf_classifier: labels must be in {0,1}");
    }

    const auto n = static_cast<Eigen::Index>(data.rows());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0 + lambda;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double k = std::exp(-gamma * squared_distance(data.features[i], data.features[j]));
            K(i, j) = k;
            K(j, i) = k;
        }
    }
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = (*data.labels)[i];

    Eigen::VectorXd alpha = K.ldlt().solve(y);
    std::vector<double> weights(alpha.data(), alpha.data() + n);
    return RbfKernelClassifier(data.features, std::move(weights), gamma);
}

}  // namespace shapkit
