#ifndef STREAMTOPIC_SUPERVISION_HPP
#define STREAMTOPIC_SUPERVISION_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamtopic/corpus.hpp"
#include "streamtopic/errors.hpp"
#include "streamtopic/rng.hpp"

namespace streamtopic {

/// One distantly-supervised binary training example. timestamp mirrors
/// the source tweet so datasets stay chronologically ordered.
struct LabeledExample {
    std::string tweet_id;
    std::int64_t timestamp = 0;
    std::string text;
    bool positive = false;
    double weight = 1.0;
};

struct MulticlassExample {
    std::string tweet_id;
    std::int64_t timestamp = 0;
    std::string text;
    std::string label;
};

enum class NegativePool {
    other_focused_only,  // tweets from focused accounts of other topics
    all_non_topic        // any non-general account whose topic set excludes the target
};

struct NegativeSamplingConfig {
    double cap_ratio = 5.0;  // negatives capped at cap_ratio * |positives|
    NegativePool pool_policy = NegativePool::other_focused_only;
    std::uint64_t seed = 0;
};

/// Index range [begin, end) into corpus.tweets; defaults to everything.
struct TweetRange {
    std::size_t begin = 0;
    std::size_t end = SIZE_MAX;

    std::size_t clamp_end(const Corpus& corpus) const {
        return std::min(end, corpus.tweets.size());
    }
};

/// Positives for one topic: exactly the tweets from accounts focused on
/// it, in corpus order. Hybrid and general streams never contribute.
inline std::vector<LabeledExample> assign_positive_labels(const Corpus& corpus,
                                                          const std::string& topic,
                                                          TweetRange range = {}) {
    if (!corpus.topics.contains(topic))
        throw ValidationError("unknown topic \"" + topic + "\"");
    const std::string t = to_lower_ascii(topic);
    std::vector<LabeledExample> out;
    const std::size_t end = range.clamp_end(corpus);
    for (std::size_t i = range.begin; i < end; ++i) {
        const Tweet& tw = corpus.tweets[i];
        const Account& acc = corpus.account_of(tw);
        if (acc.stream_type == StreamType::focused && acc.topics[0] == t)
            out.push_back({tw.id, tw.timestamp, tw.text, true, 1.0});
    }
    return out;
}

/// Uniform sample without replacement from the off-topic pool, capped at
/// floor(cap_ratio * |positives|). Deterministic given the seed; output
/// is re-sorted chronologically.
inline std::vector<LabeledExample> sample_negatives(const Corpus& corpus,
                                                    const std::string& topic,
                                                    const std::vector<LabeledExample>& positives,
                                                    const NegativeSamplingConfig& config,
                                                    TweetRange range = {}) {
    if (!corpus.topics.contains(topic))
        throw ValidationError("unknown topic \"" + topic + "\"");
    if (!(config.cap_ratio > 0)) throw ValidationError("cap_ratio must be > 0");
    if (positives.empty()) return {};

    const std::string t = to_lower_ascii(topic);
    std::vector<std::size_t> pool;
    const std::size_t end = range.clamp_end(corpus);
    for (std::size_t i = range.begin; i < end; ++i) {
        const Account& acc = corpus.account_of(corpus.tweets[i]);
        bool eligible = false;
        switch (config.pool_policy) {
            case NegativePool::other_focused_only:
                eligible = acc.stream_type == StreamType::focused && acc.topics[0] != t;
                break;
            case NegativePool::all_non_topic:
                eligible = acc.stream_type != StreamType::general && !acc.has_topic(t);
                break;
        }
        if (eligible) pool.push_back(i);
    }

    const double cap = config.cap_ratio * static_cast<double>(positives.size());
    const auto want = std::min(static_cast<std::size_t>(cap), pool.size());

    // partial Fisher-Yates: the first `want` slots become the sample
    Rng rng(config.seed);
    for (std::size_t k = 0; k < want; ++k) {
        const std::size_t j = k + rng.below(pool.size() - k);
        std::swap(pool[k], pool[j]);
    }
    pool.resize(want);
    std::sort(pool.begin(), pool.end());  // corpus index order == chronological

    std::vector<LabeledExample> out;
    out.reserve(want);
    for (std::size_t i : pool) {
        const Tweet& tw = corpus.tweets[i];
        out.push_back({tw.id, tw.timestamp, tw.text, false, 1.0});
    }
    return out;
}

/// Positives plus sampled negatives, merged chronologically. All weights
/// start at 1.0; recency weighting happens at training time.
inline std::vector<LabeledExample> build_binary_dataset(const Corpus& corpus,
                                                        const std::string& topic,
                                                        const NegativeSamplingConfig& config,
                                                        TweetRange range = {}) {
    std::vector<LabeledExample> positives = assign_positive_labels(corpus, topic, range);
    std::vector<LabeledExample> negatives =
        sample_negatives(corpus, topic, positives, config, range);
    std::vector<LabeledExample> merged;
    merged.reserve(positives.size() + negatives.size());
    std::merge(positives.begin(), positives.end(), negatives.begin(), negatives.end(),
               std::back_inserter(merged), [](const LabeledExample& a, const LabeledExample& b) {
                   return a.timestamp != b.timestamp ? a.timestamp < b.timestamp
                                                     : a.tweet_id < b.tweet_id;
               });
    return merged;
}

/// One example per focused-account tweet, labeled with that account's
/// topic; the multi-class training set.
inline std::vector<MulticlassExample> build_multiclass_dataset(const Corpus& corpus,
                                                               TweetRange range = {}) {
    std::vector<MulticlassExample> out;
    const std::size_t end = range.clamp_end(corpus);
    for (std::size_t i = range.begin; i < end; ++i) {
        const Tweet& tw = corpus.tweets[i];
        const Account& acc = corpus.account_of(tw);
        if (acc.stream_type == StreamType::focused)
            out.push_back({tw.id, tw.timestamp, tw.text, acc.topics[0]});
    }
    return out;
}

/// Human judgment row: possibly several topic labels, or "other" when
/// the assessor could not assign any configured topic.
struct GoldExample {
    std::string tweet_id;
    std::int64_t timestamp = 0;
    std::string text;
    std::vector<std::string> labels;  // lowercase, sorted; empty when other_flag
    bool other_flag = false;

    bool has_label(std::string_view topic) const {
        return std::binary_search(labels.begin(), labels.end(), topic,
                                  [](std::string_view a, std::string_view b) { return a < b; });
    }
};

/// Load the gold-standard JSON-lines file. Every label must be a
/// configured topic or the literal "other"; "other" stands alone and
/// yields an empty label set.
inline std::vector<GoldExample> load_gold(const std::filesystem::path& path,
                                          const TopicSet& topic_set = TopicSet::default_set()) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read gold file: " + path.string());
    std::vector<GoldExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_copy(line).empty()) continue;
        const auto where = [&] { return " (gold line " + std::to_string(lineno) + ")"; };
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw ValidationError("malformed gold record" + where());

        GoldExample g;
        std::string why;
        if (!detail::get_string_field(obj, "id", g.tweet_id, why) ||
            !detail::get_int_field(obj, "created_at", g.timestamp, why) ||
            !detail::get_string_field(obj, "text", g.text, why))
            throw ValidationError(why + where());

        auto it = obj.find("labels");
        if (it == obj.end() || !it->is_array())
            throw ValidationError("missing labels array" + where());
        std::set<std::string> labels;
        for (const auto& l : *it) {
            if (!l.is_string()) throw ValidationError("label is not a string" + where());
            std::string name = to_lower_ascii(trim_copy(l.get<std::string>()));
            if (name == "other") {
                g.other_flag = true;
                continue;
            }
            if (!topic_set.contains(name))
                throw ValidationError("unknown gold label \"" + name + "\"" + where());
            labels.insert(name);
        }
        if (g.other_flag && !labels.empty())
            throw ValidationError("\"other\" cannot be combined with topic labels" + where());
        if (!g.other_flag && labels.empty())
            throw ValidationError("gold record has no labels and is not \"other\"" + where());
        g.labels.assign(labels.begin(), labels.end());
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace streamtopic

#endif
