#ifndef STREAMTOPIC_HARNESS_HPP
#define STREAMTOPIC_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "streamtopic/classifiers.hpp"
#include "streamtopic/corpus.hpp"
#include "streamtopic/errors.hpp"
#include "streamtopic/features.hpp"
#include "streamtopic/supervision.hpp"

namespace streamtopic {

struct SplitSpec {
    double train_fraction = 0.8;
};

/// Chronological split: the first floor(train_fraction * N) items train,
/// the rest test. Input order is preserved, so on sorted data the whole
/// train side precedes the whole test side in time.
template <typename T>
std::pair<std::span<const T>, std::span<const T>> chronological_split(std::span<const T> items,
                                                                      SplitSpec spec = {}) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ValidationError("train_fraction must be in (0, 1)");
    if (items.size() < 2) throw ValidationError("degenerate split: need at least 2 items");
    const auto n_train =
        static_cast<std::size_t>(spec.train_fraction * static_cast<double>(items.size()));
    if (n_train == 0 || n_train == items.size())
        throw ValidationError("degenerate split: empty train or test side");
    return {items.first(n_train), items.subspan(n_train)};
}

struct RecencyWeightSpec {
    double p = 10.0;  // weight of the newest example; the oldest gets 1
};

/// Exponential recency weights: w_i = p^(i/n) for i in [0, n], so the
/// oldest example weighs 1 and the newest weighs p. p = 1 reproduces
/// unweighted training exactly.
inline std::vector<double> recency_weights(std::size_t count, const RecencyWeightSpec& spec) {
    if (spec.p < 1.0) throw ValidationError("recency weight p must be >= 1");
    if (count == 0) throw ValidationError("recency weights need at least one example");
    if (count == 1) return {1.0};
    const auto n = static_cast<double>(count - 1);
    std::vector<double> w(count);
    for (std::size_t i = 0; i < count; ++i)
        w[i] = std::pow(spec.p, static_cast<double>(i) / n);
    return w;
}

struct BinaryMetrics {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
};

/// Precision/recall/F1 with the 0-when-undefined convention for empty
/// denominators.
inline BinaryMetrics evaluate_binary(const std::vector<bool>& predictions,
                                     const std::vector<bool>& gold) {
    if (predictions.size() != gold.size())
        throw ValidationError("evaluate_binary: length mismatch");
    BinaryMetrics m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] && gold[i]) ++m.tp;
        else if (predictions[i] && !gold[i]) ++m.fp;
        else if (!predictions[i] && gold[i]) ++m.fn;
    }
    m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                      : 0.0;
    return m;
}

struct MetricsRow {
    std::string experiment;
    std::string topic;
    double window_start_frac = 0;
    double window_size_frac = 1;
    double p = 1.0;
    BinaryMetrics metrics;
};

using MetricsReport = std::vector<MetricsRow>;

/// One evaluation document: text plus the topic labels it counts as
/// positive for. Gold "other" rows and noisy general rows never appear
/// here with labels, so they evaluate negative for every topic.
struct EvalDoc {
    std::string id;
    std::int64_t timestamp = 0;
    std::string text;
    std::vector<std::string> labels;  // sorted

    bool has_label(std::string_view topic) const {
        return std::binary_search(labels.begin(), labels.end(), topic,
                                  [](std::string_view a, std::string_view b) { return a < b; });
    }
};

struct EvalSet {
    std::vector<EvalDoc> docs;

    std::int64_t min_timestamp() const {
        std::int64_t m = INT64_MAX;
        for (const EvalDoc& d : docs) m = std::min(m, d.timestamp);
        return m;
    }
};

/// Training region plus the fixed evaluation target shared by every
/// window of an experiment.
struct ExperimentPlan {
    std::size_t train_begin = 0;
    std::size_t train_end = 0;  // exclusive, indices into corpus.tweets
    EvalSet eval;

    std::size_t train_size() const { return train_end - train_begin; }
};

/// Noisy-label plan: 80/20 chronological split; test tweets inherit
/// their account's topics as labels. General accounts carry no label and
/// are left out of the evaluation side.
inline ExperimentPlan make_noisy_plan(const Corpus& corpus, SplitSpec split = {}) {
    auto [train, test] =
        chronological_split(std::span<const Tweet>(corpus.tweets), split);
    ExperimentPlan plan;
    plan.train_begin = 0;
    plan.train_end = train.size();
    for (const Tweet& tw : test) {
        const Account& acc = corpus.account_of(tw);
        if (acc.stream_type == StreamType::general) continue;
        plan.eval.docs.push_back({tw.id, tw.timestamp, tw.text, acc.topics});
    }
    if (plan.eval.docs.empty())
        throw ValidationError("noisy evaluation set is empty (no labeled test tweets)");
    return plan;
}

/// Gold plan: train on everything strictly before the earliest judgment,
/// evaluate on the judgments.
inline ExperimentPlan make_gold_plan(const Corpus& corpus, const std::vector<GoldExample>& gold) {
    if (gold.empty()) throw ValidationError("gold evaluation set is empty");
    ExperimentPlan plan;
    std::int64_t min_ts = INT64_MAX;
    for (const GoldExample& g : gold) min_ts = std::min(min_ts, g.timestamp);
    plan.train_begin = 0;
    plan.train_end = corpus.tweets.size();
    while (plan.train_end > 0 && corpus.tweets[plan.train_end - 1].timestamp >= min_ts)
        --plan.train_end;
    if (plan.train_end == 0)
        throw ValidationError("temporal leakage: no corpus tweets precede the gold judgments");
    for (const GoldExample& g : gold)
        plan.eval.docs.push_back({g.tweet_id, g.timestamp, g.text, g.labels});
    return plan;
}

/// A per-topic trained pipeline stage: window vocabulary plus the binary
/// classifier, and the newest training timestamp for leakage checks.
struct TopicModel {
    std::string topic;
    TfIdfModel tfidf;
    LogisticModel logistic;
    std::int64_t train_max_timestamp = INT64_MIN;
};

/// Inspection hook: everything a test needs to verify chronology and
/// per-window vocabulary containment.
struct WindowProbe {
    std::string experiment;
    std::string topic;
    std::size_t window_begin = 0;  // corpus tweet indices
    std::size_t window_end = 0;
    std::int64_t max_window_timestamp = INT64_MIN;
    std::int64_t min_eval_timestamp = INT64_MAX;
    const TfIdfModel* tfidf = nullptr;
    const LogisticModel* logistic = nullptr;
};

struct ExperimentOptions {
    NegativeSamplingConfig sampling;
    LogisticTrainConfig train;
    int min_df = 1;
    TokenizerOptions tokenizer;
    std::function<void(const WindowProbe&)> probe;
};

namespace detail {

// Train one topic classifier on a window of the corpus. Returns nothing
// when the window yields a single-class (or empty) dataset.
inline std::optional<TopicModel> train_topic_window(const Corpus& corpus,
                                                    const std::string& topic, std::size_t win_lo,
                                                    std::size_t win_hi, double p,
                                                    const ExperimentOptions& opts,
                                                    std::uint64_t sampling_seed) {
    NegativeSamplingConfig sampling = opts.sampling;
    sampling.seed = sampling_seed;
    std::vector<LabeledExample> dataset =
        build_binary_dataset(corpus, topic, sampling, {win_lo, win_hi});
    bool has_pos = false, has_neg = false;
    for (const LabeledExample& ex : dataset) (ex.positive ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) return std::nullopt;

    std::vector<TokenList> docs;
    docs.reserve(dataset.size());
    for (const LabeledExample& ex : dataset) docs.push_back(tokenize(ex.text, opts.tokenizer));
    TfIdfModel tfidf;
    try {
        tfidf = TfIdfModel::fit(docs, opts.min_df);
    } catch (const ValidationError&) {
        return std::nullopt;  // window with only empty documents
    }

    std::vector<double> weights(dataset.size(), 1.0);
    if (p != 1.0) weights = recency_weights(dataset.size(), {p});

    std::vector<WeightedExample> examples(dataset.size());
    std::int64_t max_ts = INT64_MIN;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        examples[i] = {tfidf.transform(docs[i]), dataset[i].positive, weights[i]};
        max_ts = std::max(max_ts, dataset[i].timestamp);
    }
    TopicModel model{topic, std::move(tfidf), {}, max_ts};
    try {
        model.logistic = train_logistic(examples, opts.train);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
    return model;
}

inline BinaryMetrics evaluate_topic(const TopicModel& model,
                                    const std::vector<TokenList>& eval_tokens,
                                    const EvalSet& eval) {
    std::vector<bool> pred(eval.docs.size()), truth(eval.docs.size());
    for (std::size_t i = 0; i < eval.docs.size(); ++i) {
        pred[i] = model.logistic.predict(model.tfidf.transform(eval_tokens[i]));
        truth[i] = eval.docs[i].has_label(model.topic);
    }
    return evaluate_binary(pred, truth);
}

inline std::vector<TokenList> tokenize_eval(const EvalSet& eval, const TokenizerOptions& opt) {
    std::vector<TokenList> tokens;
    tokens.reserve(eval.docs.size());
    for (const EvalDoc& d : eval.docs) tokens.push_back(tokenize(d.text, opt));
    return tokens;
}

// Report assembly order: topic, then window, then p.
inline void sort_report(MetricsReport& report) {
    std::sort(report.begin(), report.end(), [](const MetricsRow& a, const MetricsRow& b) {
        return std::tie(a.topic, a.window_size_frac, a.window_start_frac, a.p) <
               std::tie(b.topic, b.window_size_frac, b.window_start_frac, b.p);
    });
}

inline void check_no_leakage(const Corpus& corpus, std::size_t win_hi, const EvalSet& eval) {
    if (win_hi == 0) return;
    if (corpus.tweets[win_hi - 1].timestamp > eval.min_timestamp())
        throw ValidationError("temporal leakage: training window extends past evaluation data");
}

}  // namespace detail

/// Growing-window experiment: the window end stays pinned to the newest
/// training example while its start moves back, so each size fraction
/// trains on the most recent floor(s * N) examples of the training
/// region. TF-IDF and the classifier are refitted per window.
inline MetricsReport run_growing_window(const Corpus& corpus,
                                        const std::vector<std::string>& topics,
                                        const std::vector<double>& sizes,
                                        const ExperimentPlan& plan,
                                        const ExperimentOptions& opts = {}) {
    if (topics.empty()) throw ValidationError("no topics requested");
    if (sizes.empty()) throw ValidationError("no window sizes requested");
    for (double s : sizes)
        if (!(s > 0.0 && s <= 1.0))
            throw ValidationError("window size fractions must be in (0, 1]");
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw ValidationError("window size fractions must be ascending");

    const std::size_t region = plan.train_size();
    if (region == 0) throw ValidationError("empty training region");
    const std::vector<TokenList> eval_tokens = detail::tokenize_eval(plan.eval, opts.tokenizer);

    MetricsReport report;
    for (const std::string& raw_topic : topics) {
        const std::string topic = to_lower_ascii(raw_topic);
        const std::uint64_t seed = Rng::derive(opts.sampling.seed, "growing:" + topic);
        for (double s : sizes) {
            const auto len = static_cast<std::size_t>(s * static_cast<double>(region));
            if (len == 0) continue;  // window too small: cell absent
            const std::size_t win_hi = plan.train_end;
            const std::size_t win_lo = win_hi - len;
            detail::check_no_leakage(corpus, win_hi, plan.eval);
            auto model =
                detail::train_topic_window(corpus, topic, win_lo, win_hi, 1.0, opts, seed);
            if (!model) continue;
            if (opts.probe)
                opts.probe({"growing", topic, win_lo, win_hi,
                            corpus.tweets[win_hi - 1].timestamp, plan.eval.min_timestamp(),
                            &model->tfidf, &model->logistic});
            report.push_back(
                {"growing", topic, 1.0 - s, s, 1.0,
                 detail::evaluate_topic(*model, eval_tokens, plan.eval)});
        }
    }
    detail::sort_report(report);
    return report;
}

/// Sliding-window experiment: fixed window size R (fraction of the
/// training region), start offsets moving forward in time.
inline MetricsReport run_sliding_window(const Corpus& corpus,
                                        const std::vector<std::string>& topics, double R,
                                        const std::vector<double>& offsets,
                                        const ExperimentPlan& plan,
                                        const ExperimentOptions& opts = {}) {
    if (topics.empty()) throw ValidationError("no topics requested");
    if (offsets.empty()) throw ValidationError("no window offsets requested");
    if (!(R > 0.0 && R <= 1.0)) throw ValidationError("R must be in (0, 1]");
    constexpr double kFracSlack = 1e-9;
    for (double off : offsets)
        if (off < 0.0 || off + R > 1.0 + kFracSlack)
            throw ValidationError("window offset exceeds the training region");

    const std::size_t region = plan.train_size();
    if (region == 0) throw ValidationError("empty training region");
    const auto len = static_cast<std::size_t>(R * static_cast<double>(region));
    if (len == 0) throw ValidationError("window size R yields an empty window");

    const std::vector<TokenList> eval_tokens = detail::tokenize_eval(plan.eval, opts.tokenizer);

    MetricsReport report;
    for (const std::string& raw_topic : topics) {
        const std::string topic = to_lower_ascii(raw_topic);
        const std::uint64_t seed = Rng::derive(opts.sampling.seed, "sliding:" + topic);
        for (double off : offsets) {
            std::size_t win_lo =
                plan.train_begin +
                static_cast<std::size_t>(off * static_cast<double>(region));
            win_lo = std::min(win_lo, plan.train_end - len);  // floor rounding guard
            const std::size_t win_hi = win_lo + len;
            detail::check_no_leakage(corpus, win_hi, plan.eval);
            auto model =
                detail::train_topic_window(corpus, topic, win_lo, win_hi, 1.0, opts, seed);
            if (!model) continue;
            if (opts.probe)
                opts.probe({"sliding", topic, win_lo, win_hi,
                            corpus.tweets[win_hi - 1].timestamp, plan.eval.min_timestamp(),
                            &model->tfidf, &model->logistic});
            report.push_back(
                {"sliding", topic, off, R, 1.0,
                 detail::evaluate_topic(*model, eval_tokens, plan.eval)});
        }
    }
    detail::sort_report(report);
    return report;
}

struct WeightingDelta {
    std::string topic;  // a configured topic, or "all" for pooled decisions
    double f1_unweighted = 0;
    double f1_weighted = 0;
    double delta = 0;
};

struct WeightingResult {
    MetricsReport rows;  // paired rows per topic: p = 1 and p = spec p
    std::vector<WeightingDelta> deltas;
};

/// Table-3 experiment: train each topic classifier on the full training
/// region with and without recency weighting (same data, same seed) and
/// report the per-topic F1 difference, plus an "all" row over the pooled
/// decisions of every topic classifier.
inline WeightingResult run_weighting_delta(const Corpus& corpus,
                                           const std::vector<std::string>& topics, double p,
                                           const ExperimentPlan& plan,
                                           const ExperimentOptions& opts = {}) {
    if (topics.empty()) throw ValidationError("no topics requested");
    if (p < 1.0) throw ValidationError("recency weight p must be >= 1");
    const std::size_t region = plan.train_size();
    if (region == 0) throw ValidationError("empty training region");

    const std::vector<TokenList> eval_tokens = detail::tokenize_eval(plan.eval, opts.tokenizer);

    WeightingResult result;
    std::vector<bool> pooled_pred_u, pooled_pred_w, pooled_truth;
    for (const std::string& raw_topic : topics) {
        const std::string topic = to_lower_ascii(raw_topic);
        const std::uint64_t seed = Rng::derive(opts.sampling.seed, "weighting:" + topic);
        auto unweighted = detail::train_topic_window(corpus, topic, plan.train_begin,
                                                     plan.train_end, 1.0, opts, seed);
        auto weighted = detail::train_topic_window(corpus, topic, plan.train_begin,
                                                   plan.train_end, p, opts, seed);
        if (!unweighted || !weighted) continue;
        if (opts.probe)
            opts.probe({"weighting", topic, plan.train_begin, plan.train_end,
                        corpus.tweets[plan.train_end - 1].timestamp, plan.eval.min_timestamp(),
                        &weighted->tfidf, &weighted->logistic});

        BinaryMetrics mu, mw;
        for (std::size_t i = 0; i < plan.eval.docs.size(); ++i) {
            const bool truth = plan.eval.docs[i].has_label(topic);
            const bool pu =
                unweighted->logistic.predict(unweighted->tfidf.transform(eval_tokens[i]));
            const bool pw = weighted->logistic.predict(weighted->tfidf.transform(eval_tokens[i]));
            pooled_pred_u.push_back(pu);
            pooled_pred_w.push_back(pw);
            pooled_truth.push_back(truth);
        }
        {
            std::vector<bool> pu(pooled_pred_u.end() - plan.eval.docs.size(), pooled_pred_u.end());
            std::vector<bool> pw(pooled_pred_w.end() - plan.eval.docs.size(), pooled_pred_w.end());
            std::vector<bool> tr(pooled_truth.end() - plan.eval.docs.size(), pooled_truth.end());
            mu = evaluate_binary(pu, tr);
            mw = evaluate_binary(pw, tr);
        }
        result.rows.push_back({"weighting", topic, 0.0, 1.0, 1.0, mu});
        result.rows.push_back({"weighting", topic, 0.0, 1.0, p, mw});
        result.deltas.push_back({topic, mu.f1, mw.f1, mw.f1 - mu.f1});
    }
    if (!pooled_truth.empty()) {
        const BinaryMetrics mu = evaluate_binary(pooled_pred_u, pooled_truth);
        const BinaryMetrics mw = evaluate_binary(pooled_pred_w, pooled_truth);
        result.rows.push_back({"weighting", "all", 0.0, 1.0, 1.0, mu});
        result.rows.push_back({"weighting", "all", 0.0, 1.0, p, mw});
        result.deltas.push_back({"all", mu.f1, mw.f1, mw.f1 - mu.f1});
    }
    detail::sort_report(result.rows);
    return result;
}

/// Evaluate already-trained per-topic models against gold judgments.
/// Gold rows count positive for each of their labels; "other" rows are
/// negative everywhere. Models must predate the judgments.
inline MetricsReport evaluate_on_gold(const std::vector<TopicModel>& models,
                                      const std::vector<GoldExample>& gold,
                                      const TokenizerOptions& tokenizer = {}) {
    if (gold.empty()) throw ValidationError("gold evaluation set is empty");
    std::int64_t min_ts = INT64_MAX;
    for (const GoldExample& g : gold) min_ts = std::min(min_ts, g.timestamp);
    for (const TopicModel& m : models)
        if (m.train_max_timestamp >= min_ts)
            throw ValidationError("temporal leakage: model for \"" + m.topic +
                                  "\" was trained on data newer than the gold set");

    std::vector<TokenList> tokens;
    tokens.reserve(gold.size());
    for (const GoldExample& g : gold) tokens.push_back(tokenize(g.text, tokenizer));

    MetricsReport report;
    for (const TopicModel& m : models) {
        std::vector<bool> pred(gold.size()), truth(gold.size());
        for (std::size_t i = 0; i < gold.size(); ++i) {
            pred[i] = m.logistic.predict(m.tfidf.transform(tokens[i]));
            truth[i] = gold[i].has_label(m.topic);
        }
        report.push_back({"gold", m.topic, 0.0, 1.0, 1.0, evaluate_binary(pred, truth)});
    }
    return report;
}

inline const char* kResultsCsvHeader =
    "experiment,topic,window_start_frac,window_size_frac,p,precision,recall,f1,tp,fp,fn";

/// Write the results CSV: fixed column order, 6 decimal places, UTF-8.
inline void export_results(const MetricsReport& report, const std::filesystem::path& path) {
    if (report.empty()) throw ValidationError("cannot export an empty report");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write results CSV: " + path.string());
    out << kResultsCsvHeader << '\n';
    for (const MetricsRow& row : report) {
        out << row.experiment << ',' << row.topic << ',' << format_fixed6(row.window_start_frac)
            << ',' << format_fixed6(row.window_size_frac) << ',' << format_fixed6(row.p) << ','
            << format_fixed6(row.metrics.precision) << ',' << format_fixed6(row.metrics.recall)
            << ',' << format_fixed6(row.metrics.f1) << ',' << row.metrics.tp << ','
            << row.metrics.fp << ',' << row.metrics.fn << '\n';
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

inline MetricsReport parse_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read results CSV: " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim_copy(line) != kResultsCsvHeader)
        throw ValidationError("results CSV: missing or unexpected header");
    MetricsReport report;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_copy(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 11)
            throw ValidationError("results CSV line " + std::to_string(lineno) +
                                  ": expected 11 columns");
        MetricsRow row;
        row.experiment = fields[0];
        row.topic = fields[1];
        try {
            row.window_start_frac = std::stod(fields[2]);
            row.window_size_frac = std::stod(fields[3]);
            row.p = std::stod(fields[4]);
            row.metrics.precision = std::stod(fields[5]);
            row.metrics.recall = std::stod(fields[6]);
            row.metrics.f1 = std::stod(fields[7]);
            row.metrics.tp = std::stoll(fields[8]);
            row.metrics.fp = std::stoll(fields[9]);
            row.metrics.fn = std::stoll(fields[10]);
        } catch (const std::exception&) {
            throw ValidationError("results CSV line " + std::to_string(lineno) +
                                  ": malformed numeric field");
        }
        report.push_back(std::move(row));
    }
    return report;
}

}  // namespace streamtopic

#endif
