#ifndef STREAMTOPIC_MODEL_IO_HPP
#define STREAMTOPIC_MODEL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamtopic/classifiers.hpp"
#include "streamtopic/errors.hpp"
#include "streamtopic/features.hpp"
#include "streamtopic/harness.hpp"
#include "streamtopic/json_util.hpp"

namespace streamtopic {

/// Serialized training output of the CLI. Either a set of per-topic
/// binary logistic pipelines or one multi-class naive Bayes pipeline;
/// floats carry 17 significant digits so files round-trip bit-exactly.
struct LrBundle {
    double p = 1.0;
    std::uint64_t seed = 0;
    std::int64_t trained_until = INT64_MIN;
    std::vector<TopicModel> models;  // in configured topic order
};

struct NbBundle {
    std::uint64_t seed = 0;
    std::int64_t trained_until = INT64_MIN;
    TfIdfModel tfidf;  // supplies the vocabulary for count vectors
    NaiveBayesModel nb;
};

namespace detail {

inline std::string logistic_to_json(const LogisticModel& m) {
    std::string out = "{\"bias\": " + format_double17(m.bias()) + ", \"l2_lambda\": " +
                      format_double17(m.config().l2_lambda) +
                      ", \"max_iters\": " + std::to_string(m.config().max_iters) +
                      ", \"tolerance\": " + format_double17(m.config().tolerance) +
                      ", \"decision_threshold\": " + format_double17(m.config().decision_threshold) +
                      ", \"weights\": [";
    for (std::size_t i = 0; i < m.weights().size(); ++i) {
        if (i) out += ", ";
        out += format_double17(m.weights()[i]);
    }
    return out + "]}";
}

inline LogisticModel logistic_from_json(const nlohmann::json& doc) {
    LogisticTrainConfig config;
    config.l2_lambda = doc.at("l2_lambda").get<double>();
    config.max_iters = doc.at("max_iters").get<int>();
    config.tolerance = doc.at("tolerance").get<double>();
    config.decision_threshold = doc.at("decision_threshold").get<double>();
    return LogisticModel(doc.at("weights").get<std::vector<double>>(),
                         doc.at("bias").get<double>(), config);
}

}  // namespace detail

inline void save_lr_bundle(const LrBundle& bundle, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write model file: " + path.string());
    out << "{\"model\": \"lr\", \"p\": " << format_double17(bundle.p)
        << ", \"seed\": " << bundle.seed << ", \"trained_until\": " << bundle.trained_until
        << ", \"topics\": {";
    for (std::size_t i = 0; i < bundle.models.size(); ++i) {
        const TopicModel& m = bundle.models[i];
        if (i) out << ", ";
        out << json_quote(m.topic) << ": {\"tfidf\": " << m.tfidf.to_json()
            << ", \"logistic\": " << detail::logistic_to_json(m.logistic) << "}";
    }
    out << "}}\n";
    if (!out) throw ValidationError("write failed: " + path.string());
}

inline void save_nb_bundle(const NbBundle& bundle, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write model file: " + path.string());
    out << "{\"model\": \"nb\", \"alpha\": " << format_double17(bundle.nb.smoothing_alpha())
        << ", \"seed\": " << bundle.seed << ", \"trained_until\": " << bundle.trained_until
        << ", \"tfidf\": " << bundle.tfidf.to_json() << ", \"classes\": [";
    const auto& classes = bundle.nb.classes();
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (i) out << ", ";
        out << json_quote(classes[i]);
    }
    out << "], \"class_log_priors\": [";
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (i) out << ", ";
        out << format_double17(bundle.nb.class_log_priors()[i]);
    }
    out << "], \"feature_log_likelihoods\": [";
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (c) out << ", ";
        out << "[";
        const auto& row = bundle.nb.feature_log_likelihoods()[c];
        for (std::size_t t = 0; t < row.size(); ++t) {
            if (t) out << ", ";
            out << format_double17(row[t]);
        }
        out << "]";
    }
    out << "]}\n";
    if (!out) throw ValidationError("write failed: " + path.string());
}

inline std::string model_kind(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read model file: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("model"))
        throw ValidationError("malformed model file: " + path.string());
    return doc.at("model").get<std::string>();
}

inline LrBundle load_lr_bundle(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read model file: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ValidationError("malformed model file: " + path.string());
    if (doc.value("model", "") != "lr")
        throw ValidationError("not a logistic model bundle: " + path.string());
    LrBundle bundle;
    bundle.p = doc.at("p").get<double>();
    bundle.seed = doc.at("seed").get<std::uint64_t>();
    bundle.trained_until = doc.at("trained_until").get<std::int64_t>();
    for (const auto& [topic, entry] : doc.at("topics").items()) {
        TopicModel m;
        m.topic = topic;
        m.tfidf = TfIdfModel::from_json(entry.at("tfidf"));
        m.logistic = detail::logistic_from_json(entry.at("logistic"));
        m.train_max_timestamp = bundle.trained_until;
        bundle.models.push_back(std::move(m));
    }
    return bundle;
}

inline NbBundle load_nb_bundle(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read model file: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ValidationError("malformed model file: " + path.string());
    if (doc.value("model", "") != "nb")
        throw ValidationError("not a naive bayes model bundle: " + path.string());
    NbBundle bundle;
    bundle.seed = doc.at("seed").get<std::uint64_t>();
    bundle.trained_until = doc.at("trained_until").get<std::int64_t>();
    bundle.tfidf = TfIdfModel::from_json(doc.at("tfidf"));
    bundle.nb = NaiveBayesModel(doc.at("classes").get<std::vector<std::string>>(),
                                doc.at("class_log_priors").get<std::vector<double>>(),
                                doc.at("feature_log_likelihoods")
                                    .get<std::vector<std::vector<double>>>(),
                                doc.at("alpha").get<double>());
    return bundle;
}

}  // namespace streamtopic

#endif
