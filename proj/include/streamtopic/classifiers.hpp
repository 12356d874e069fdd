#ifndef STREAMTOPIC_CLASSIFIERS_HPP
#define STREAMTOPIC_CLASSIFIERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "streamtopic/errors.hpp"
#include "streamtopic/features.hpp"

namespace streamtopic {

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// ln(1 + e^z) without overflow.
inline double softplus(double z) {
    return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

/// One training example for the binary model: sparse features, 0/1
/// label, positive importance weight.
struct WeightedExample {
    FeatureVector x;
    bool label = false;
    double weight = 1.0;
};

struct LogisticTrainConfig {
    double l2_lambda = 1.0;
    int max_iters = 1000;
    double tolerance = 1e-6;  // stop when the gradient infinity-norm falls below
    double decision_threshold = 0.5;
};

struct LossGrad {
    double loss = 0;
    std::vector<double> grad;
    double grad_bias = 0;
};

inline double sparse_dot(std::span<const double> weights, const FeatureVector& x) {
    double z = 0;
    for (const auto& [i, v] : x.entries) z += weights[i] * v;
    return z;
}

/// Weighted negative log-likelihood plus (l2/2)*||w||^2 (bias excluded
/// from the penalty), with its exact analytic gradient.
inline LossGrad logistic_loss_grad(std::span<const double> weights, double bias,
                                   std::span<const WeightedExample> examples, double l2_lambda) {
    LossGrad out;
    out.grad.assign(weights.size(), 0.0);
    for (const WeightedExample& ex : examples) {
        if (ex.x.dim != weights.size())
            throw ValidationError("logistic: feature dimension mismatch");
        const double z = sparse_dot(weights, ex.x) + bias;
        const double y = ex.label ? 1.0 : 0.0;
        out.loss += ex.weight * (softplus(z) - y * z);
        const double g = ex.weight * (sigmoid(z) - y);
        for (const auto& [i, v] : ex.x.entries) out.grad[i] += g * v;
        out.grad_bias += g;
    }
    double sq = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        sq += weights[i] * weights[i];
        out.grad[i] += l2_lambda * weights[i];
    }
    out.loss += 0.5 * l2_lambda * sq;
    return out;
}

/// Trained binary classifier: dense weights over the feature space plus
/// an unregularized bias.
class LogisticModel {
public:
    LogisticModel() = default;
    LogisticModel(std::vector<double> weights, double bias, LogisticTrainConfig config)
        : weights_(std::move(weights)), bias_(bias), config_(config) {}

    double predict_proba(const FeatureVector& x) const {
        if (x.dim != weights_.size())
            throw ValidationError("logistic: feature dimension mismatch");
        return sigmoid(sparse_dot(weights_, x) + bias_);
    }

    bool predict(const FeatureVector& x) const {
        return predict_proba(x) >= config_.decision_threshold;
    }

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    const LogisticTrainConfig& config() const { return config_; }

private:
    std::vector<double> weights_;
    double bias_ = 0;
    LogisticTrainConfig config_;
};

/// Full-batch gradient descent with backtracking line search, started
/// from zero. Deterministic: no weight initialization noise, no data
/// shuffling. Internally the objective is divided by the total example
/// weight, which keeps the trajectory invariant under constant weight
/// rescaling; the argmin is unchanged.
inline LogisticModel train_logistic(std::span<const WeightedExample> examples,
                                    const LogisticTrainConfig& config = {}) {
    if (examples.empty()) throw ValidationError("logistic: degenerate labels (empty dataset)");
    const std::size_t dim = examples[0].x.dim;
    bool has_pos = false, has_neg = false;
    double total_weight = 0;
    for (const WeightedExample& ex : examples) {
        if (ex.x.dim != dim) throw ValidationError("logistic: feature dimension mismatch");
        if (!(ex.weight > 0) || !std::isfinite(ex.weight))
            throw ValidationError("logistic: example weight must be positive and finite");
        for (const auto& [i, v] : ex.x.entries)
            if (!std::isfinite(v)) throw ValidationError("logistic: non-finite feature value");
        (ex.label ? has_pos : has_neg) = true;
        total_weight += ex.weight;
    }
    if (!has_pos || !has_neg) throw ValidationError("logistic: degenerate labels");

    const double inv_w = 1.0 / total_weight;
    std::vector<double> w(dim, 0.0);
    double b = 0;

    auto eval = [&](const std::vector<double>& weights, double bias) {
        LossGrad lg = logistic_loss_grad(weights, bias, examples, config.l2_lambda);
        lg.loss *= inv_w;
        for (double& g : lg.grad) g *= inv_w;
        lg.grad_bias *= inv_w;
        return lg;
    };

    LossGrad cur = eval(w, b);
    double step = 1.0;
    std::vector<double> trial(dim);
    for (int iter = 0; iter < config.max_iters; ++iter) {
        double ginf = std::abs(cur.grad_bias);
        for (double g : cur.grad) ginf = std::max(ginf, std::abs(g));
        if (ginf < config.tolerance) break;

        double gg = cur.grad_bias * cur.grad_bias;
        for (double g : cur.grad) gg += g * g;

        // Armijo backtracking along the steepest-descent direction
        constexpr double kArmijo = 1e-4;
        double t = step;
        LossGrad next;
        double trial_bias = b;
        while (true) {
            for (std::size_t i = 0; i < dim; ++i) trial[i] = w[i] - t * cur.grad[i];
            trial_bias = b - t * cur.grad_bias;
            next = eval(trial, trial_bias);
            if (next.loss <= cur.loss - kArmijo * t * gg || t < 1e-20) break;
            t *= 0.5;
        }
        if (t < 1e-20) break;  // step underflow: no further progress possible
        w.swap(trial);
        b = trial_bias;
        cur = std::move(next);
        step = t * 2.0;
    }
    return LogisticModel(std::move(w), b, config);
}

/// Multinomial naive Bayes over raw term counts with Laplace-style
/// additive smoothing. Class order is lexicographic by label.
class NaiveBayesModel {
public:
    NaiveBayesModel() = default;
    NaiveBayesModel(std::vector<std::string> classes, std::vector<double> log_priors,
                    std::vector<std::vector<double>> log_likelihoods, double alpha)
        : classes_(std::move(classes)),
          log_priors_(std::move(log_priors)),
          log_likelihoods_(std::move(log_likelihoods)),
          alpha_(alpha) {}

    const std::vector<std::string>& classes() const { return classes_; }
    const std::vector<double>& class_log_priors() const { return log_priors_; }
    const std::vector<std::vector<double>>& feature_log_likelihoods() const {
        return log_likelihoods_;
    }
    double smoothing_alpha() const { return alpha_; }
    std::size_t dim() const {
        return log_likelihoods_.empty() ? 0 : log_likelihoods_[0].size();
    }

private:
    std::vector<std::string> classes_;  // lexicographic
    std::vector<double> log_priors_;
    std::vector<std::vector<double>> log_likelihoods_;  // [class][term]
    double alpha_ = 1.0;
};

struct MulticlassCounts {
    FeatureVector counts;  // nonnegative term counts
    std::string label;
};

inline NaiveBayesModel train_nb(std::span<const MulticlassCounts> examples, double alpha = 1.0) {
    if (!(alpha > 0)) throw ValidationError("naive bayes: alpha must be > 0");
    if (examples.empty()) throw ValidationError("naive bayes: empty dataset");
    const std::size_t dim = examples[0].counts.dim;
    if (dim == 0) throw ValidationError("naive bayes: zero-dimensional features");

    std::map<std::string, std::size_t> class_sizes;
    for (const MulticlassCounts& ex : examples) {
        if (ex.counts.dim != dim)
            throw ValidationError("naive bayes: feature dimension mismatch");
        for (const auto& [i, v] : ex.counts.entries)
            if (!(v >= 0) || !std::isfinite(v))
                throw ValidationError("naive bayes: counts must be nonnegative and finite");
        ++class_sizes[ex.label];
    }
    if (class_sizes.size() < 2)
        throw ValidationError("naive bayes: need at least two classes");

    std::vector<std::string> classes;
    std::map<std::string, std::size_t> class_index;
    for (const auto& [label, count] : class_sizes) {
        class_index[label] = classes.size();
        classes.push_back(label);
    }

    const auto n_classes = classes.size();
    std::vector<double> priors(n_classes);
    std::vector<std::vector<double>> loglik(n_classes, std::vector<double>(dim, 0.0));
    std::vector<double> class_totals(n_classes, 0.0);
    for (const MulticlassCounts& ex : examples) {
        const std::size_t c = class_index[ex.label];
        for (const auto& [i, v] : ex.counts.entries) {
            loglik[c][i] += v;
            class_totals[c] += v;
        }
    }
    const auto n = static_cast<double>(examples.size());
    for (std::size_t c = 0; c < n_classes; ++c) {
        priors[c] = std::log(static_cast<double>(class_sizes[classes[c]]) / n);
        const double denom = class_totals[c] + alpha * static_cast<double>(dim);
        for (std::size_t t = 0; t < dim; ++t)
            loglik[c][t] = std::log((loglik[c][t] + alpha) / denom);
    }
    return NaiveBayesModel(std::move(classes), std::move(priors), std::move(loglik), alpha);
}

struct NbPrediction {
    std::string label;
    std::vector<double> log_posteriors;  // unnormalized, per class in model order
};

/// Argmax of log prior + sum of count-weighted log likelihoods. Ties go
/// to the lexicographically smallest class label.
inline NbPrediction nb_predict(const NaiveBayesModel& model, const FeatureVector& x) {
    if (x.dim != model.dim()) throw ValidationError("naive bayes: feature dimension mismatch");
    for (const auto& [i, v] : x.entries)
        if (!(v >= 0) || !std::isfinite(v))
            throw ValidationError("naive bayes: counts must be nonnegative and finite");

    NbPrediction pred;
    const auto& classes = model.classes();
    pred.log_posteriors.resize(classes.size());
    std::size_t best = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        double score = model.class_log_priors()[c];
        const auto& ll = model.feature_log_likelihoods()[c];
        for (const auto& [i, v] : x.entries) score += v * ll[i];
        pred.log_posteriors[c] = score;
        if (score > pred.log_posteriors[best]) best = c;  // strict: ties keep the earlier class
    }
    pred.label = classes[best];
    return pred;
}

}  // namespace streamtopic

#endif
