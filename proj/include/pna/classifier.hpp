#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pna/sampling.hpp"

namespace pna {

// L2-regularized logistic regression over standardized features.
struct LinkModel {
    std::vector<double> weights;
    double bias = 0.0;
    Standardization standardization;

    bool operator==(const LinkModel&) const = default;
};

struct PredictionScore {
    Edge pair{0, 0};
    double probability = 0.0;
    int label = -1;  // +1 iff probability >= 0.5
};

struct TrainOptions {
    double l2 = 1e-3;
    int epochs = 500;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
};

// Average logistic loss plus (l2/2)*|w|^2 and its analytic gradient at the
// given parameters, over standardized features. Exposed so finite-difference
// checks can probe arbitrary points.
struct LossGradient {
    double loss = 0.0;
    std::vector<double> weight_grad;
    double bias_grad = 0.0;
};
LossGradient logistic_loss_gradient(const std::vector<std::vector<double>>& features,
                                    const std::vector<int>& labels,
                                    const std::vector<double>& weights, double bias, double l2);

// Deterministic full-batch gradient descent with backtracking: a step that
// raises the loss is retried at half the rate, up to 20 halvings, so the
// accepted loss sequence never increases. Requires both classes.
LinkModel train(const std::vector<LabeledInstance>& data, const TrainOptions& options = {});

double predict_probability(const LinkModel& model, const std::vector<double>& features);
PredictionScore predict(const LinkModel& model, Edge pair, const std::vector<double>& features);

struct Metrics {
    double accuracy = 0.0;
    double f1 = 0.0;
    std::optional<double> auc;  // empty when not computed
};

// Accuracy, F1 on the positive class, and rank AUC with ties counted half.
// Truth labels must contain both classes for AUC to be defined.
Metrics compute_metrics(const std::vector<PredictionScore>& scores,
                        const std::vector<int>& truth);

// Versioned TSV serialization; doubles round-trip exactly.
void save_model(const LinkModel& model, const std::filesystem::path& path);
LinkModel load_model(const std::filesystem::path& path);

}  // namespace pna
