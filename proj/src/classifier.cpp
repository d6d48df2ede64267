#include "pna/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pna/rng.hpp"
#include "pna/tsv.hpp"

namespace pna {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + exp(-m)) without overflow for large |m|
double log1p_exp_neg(double m) {
    if (m > 0) return std::log1p(std::exp(-m));
    return -m + std::log1p(std::exp(m));
}

}  // namespace

LossGradient logistic_loss_gradient(const std::vector<std::vector<double>>& features,
                                    const std::vector<int>& labels,
                                    const std::vector<double>& weights, double bias, double l2) {
    const std::size_t n = features.size();
    const std::size_t d = weights.size();
    if (labels.size() != n) throw ConfigError("labels do not match feature rows");

    LossGradient out;
    out.weight_grad.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double z = bias;
        for (std::size_t j = 0; j < d; ++j) z += weights[j] * features[i][j];
        const double y = static_cast<double>(labels[i]);
        out.loss += log1p_exp_neg(y * z);
        const double coef = -y * sigmoid(-y * z);  // d/dz of the per-sample loss
        for (std::size_t j = 0; j < d; ++j) out.weight_grad[j] += coef * features[i][j];
        out.bias_grad += coef;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.loss *= inv_n;
    out.bias_grad *= inv_n;
    for (std::size_t j = 0; j < d; ++j)
        out.weight_grad[j] = out.weight_grad[j] * inv_n + l2 * weights[j];
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    out.loss += 0.5 * l2 * reg;
    return out;
}

LinkModel train(const std::vector<LabeledInstance>& data, const TrainOptions& options) {
    if (data.empty()) throw ConfigError("train: empty dataset");
    bool has_pos = false, has_neg = false;
    for (const auto& inst : data) {
        if (inst.label == 1) has_pos = true;
        else if (inst.label == -1) has_neg = true;
        else throw ConfigError("train: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw ConfigError("train: both classes required");

    LinkModel model;
    model.standardization = fit_standardization(data);
    const std::size_t d = model.standardization.mean.size();
    const std::size_t n = data.size();

    std::vector<std::vector<double>> x(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = standardize(model.standardization, data[i].features);
        y[i] = data[i].label;
    }

    // Small seeded init; dimensions that carried no variance stay exactly
    // zero and never move (their standardized inputs are all zero, so the
    // data gradient vanishes and l2 keeps them pinned).
    Rng rng(options.seed);
    model.weights.assign(d, 0.0);
    std::vector<double> variance_seen(d, 0.0);
    for (const auto& xi : x)
        for (std::size_t j = 0; j < d; ++j) variance_seen[j] += std::abs(xi[j]);
    for (std::size_t j = 0; j < d; ++j) {
        const double u = (rng.uniform01() - 0.5) * 0.02;
        if (variance_seen[j] > 0.0) model.weights[j] = u;
    }

    double lr = options.learning_rate;
    LossGradient current = logistic_loss_gradient(x, y, model.weights, model.bias, options.l2);
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        bool accepted = false;
        for (int halving = 0; halving <= 20; ++halving) {
            std::vector<double> w_next(d);
            for (std::size_t j = 0; j < d; ++j)
                w_next[j] = model.weights[j] - lr * current.weight_grad[j];
            const double b_next = model.bias - lr * current.bias_grad;
            LossGradient next = logistic_loss_gradient(x, y, w_next, b_next, options.l2);
            if (next.loss <= current.loss) {
                model.weights = std::move(w_next);
                model.bias = b_next;
                current = std::move(next);
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (!accepted) break;  // no step at any rate improves: converged
    }
    return model;
}

double predict_probability(const LinkModel& model, const std::vector<double>& features) {
    if (features.size() != model.weights.size())
        throw ConfigError("predict: feature dimension mismatch");
    const std::vector<double> z = standardize(model.standardization, features);
    double score = model.bias;
    for (std::size_t j = 0; j < z.size(); ++j) score += model.weights[j] * z[j];
    return sigmoid(score);
}

PredictionScore predict(const LinkModel& model, Edge pair, const std::vector<double>& features) {
    PredictionScore s;
    s.pair = pair;
    s.probability = predict_probability(model, features);
    s.label = s.probability >= 0.5 ? 1 : -1;
    return s;
}

Metrics compute_metrics(const std::vector<PredictionScore>& scores,
                        const std::vector<int>& truth) {
    if (scores.empty()) throw ConfigError("metrics: empty input");
    if (scores.size() != truth.size()) throw ConfigError("metrics: length mismatch");

    std::int64_t correct = 0, tp = 0, fp = 0, fn = 0, pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (truth[i] != 1 && truth[i] != -1) throw ConfigError("metrics: labels must be +1 or -1");
        (truth[i] == 1 ? pos : neg) += 1;
        if (scores[i].label == truth[i]) ++correct;
        if (scores[i].label == 1 && truth[i] == 1) ++tp;
        if (scores[i].label == 1 && truth[i] == -1) ++fp;
        if (scores[i].label == -1 && truth[i] == 1) ++fn;
    }

    Metrics m;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(scores.size());
    if (tp == 0) {
        m.f1 = 0.0;
    } else {
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        m.f1 = 2.0 * precision * recall / (precision + recall);
    }

    if (pos == 0 || neg == 0)
        throw ConfigError("metrics: AUC undefined, only one class present in truth");

    // rank AUC: (concordant + ties/2) / (pos * neg), counted exactly
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a].probability < scores[b].probability;
    });
    std::int64_t doubled = 0;  // 2*concordant + tied
    std::int64_t neg_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::int64_t group_pos = 0, group_neg = 0;
        while (j < order.size() &&
               scores[order[j]].probability == scores[order[i]].probability) {
            (truth[order[j]] == 1 ? group_pos : group_neg) += 1;
            ++j;
        }
        doubled += group_pos * (2 * neg_below + group_neg);
        neg_below += group_neg;
        i = j;
    }
    m.auc = static_cast<double>(doubled) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return m;
}

void save_model(const LinkModel& model, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "# link model v1\n";
    out << "dim\t" << model.weights.size() << '\n';
    out << "bias\t" << format_double(model.bias) << '\n';
    for (std::size_t j = 0; j < model.weights.size(); ++j)
        out << "w\t" << j << '\t' << format_double(model.weights[j]) << '\t'
            << format_double(model.standardization.mean[j]) << '\t'
            << format_double(model.standardization.stddev[j]) << '\n';
}

LinkModel load_model(const std::filesystem::path& path) {
    TsvReader reader(path);
    LinkModel model;
    std::vector<std::string> fields;
    std::size_t dim = 0;
    bool have_dim = false;
    while (reader.next(fields)) {
        if (fields[0] == "dim" && fields.size() == 2) {
            dim = static_cast<std::size_t>(parse_int(reader, fields[1]));
            model.weights.assign(dim, 0.0);
            model.standardization.mean.assign(dim, 0.0);
            model.standardization.stddev.assign(dim, 1.0);
            have_dim = true;
        } else if (fields[0] == "bias" && fields.size() == 2) {
            model.bias = parse_double(reader, fields[1]);
        } else if (fields[0] == "w" && fields.size() == 5) {
            if (!have_dim) reader.fail("weight row before dim row");
            const std::size_t j = static_cast<std::size_t>(parse_int(reader, fields[1]));
            if (j >= dim) reader.fail("weight index out of range");
            model.weights[j] = parse_double(reader, fields[2]);
            model.standardization.mean[j] = parse_double(reader, fields[3]);
            model.standardization.stddev[j] = parse_double(reader, fields[4]);
        } else {
            reader.fail("unrecognized model row");
        }
    }
    if (!have_dim) throw DataError("model file missing dim row: " + path.string());
    return model;
}

}  // namespace pna
