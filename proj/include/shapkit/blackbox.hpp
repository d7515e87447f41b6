#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapkit/dataset.hpp"

namespace shapkit {

/// Opaque scalar-prediction function over full-length feature vectors.
/// Batch prediction is the primitive so coalition enumeration can amortize
/// transport and model overhead. Implementations must be deterministic and
/// const-callable from concurrent workers.
class BlackBoxModel {
public:
    virtual ~BlackBoxModel() = default;

    virtual std::size_t feature_count() const = 0;
    virtual std::vector<double> predict(const Matrix& batch) const = 0;

    double predict_one(const FeatureVector& x) const { return predict({x}).front(); }

protected:
    void check_batch(const Matrix& batch) const {
        for (const auto& row : batch) {
            if (row.size() != feature_count()) {
                throw std::invalid_argument(
                    "predict: expected " + std::to_string(feature_count()) +
                    " features, got " + std::to_string(row.size()));
            }
        }
    }
};

std::vector<double> predict_batch(const BlackBoxModel& model, const Matrix& batch);

class LinearModel final : public BlackBoxModel {
public:
    LinearModel(std::vector<double> coefficients, double intercept)
        : coefficients_(std::move(coefficients)), intercept_(intercept) {}

    std::size_t feature_count() const override { return coefficients_.size(); }
    std::vector<double> predict(const Matrix& batch) const override;

    const std::vector<double>& coefficients() const { return coefficients_; }
    double intercept() const { return intercept_; }

private:
    std::vector<double> coefficients_;
    double intercept_;
};

/// Adapter for arbitrary deterministic functions, mostly used as a test model.
class FunctionModel final : public BlackBoxModel {
public:
    FunctionModel(std::size_t m, std::function<double(const FeatureVector&)> fn)
        : feature_count_(m), fn_(std::move(fn)) {}

    std::size_t feature_count() const override { return feature_count_; }
    std::vector<double> predict(const Matrix& batch) const override;

private:
    std::size_t feature_count_;
    std::function<double(const FeatureVector&)> fn_;
};

/// RBF kernel ridge classifier standing in for a kernel SVM black box.
/// Decision score is a real; class = score thresholded at 0.5.
class RbfKernelClassifier final : public BlackBoxModel {
public:
    RbfKernelClassifier(Matrix support_points, std::vector<double> dual_weights,
                        double gamma);

    std::size_t feature_count() const override;
    std::vector<double> predict(const Matrix& batch) const override;

    double training_accuracy(const Dataset& data) const;

private:
    Matrix support_points_;
    std::vector<double> dual_weights_;
    double gamma_;
};

// Closed-form fit of (K + lambda I) alpha = y with K_ij = exp(-gamma |xi-xj|^2).
RbfKernelClassifier train_rbf_classifier(const Dataset& data, double gamma, double lambda);

}  // namespace shapkit
