#ifndef STREAMTOPIC_SYNTH_HPP
#define STREAMTOPIC_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamtopic/corpus.hpp"
#include "streamtopic/errors.hpp"
#include "streamtopic/rng.hpp"

namespace streamtopic {

/// Seeded generator configuration. Focused/hybrid counts are per topic
/// (each hybrid account pairs a topic with the next one in configured
/// order); general is a total count. drift_rate controls how fast each
/// topic's token distribution moves from its start lexicon to its end
/// lexicon across the time span: 0 means stationary, 1 means the shift
/// completes exactly at the end of the span, larger values complete it
/// earlier.
struct SynthConfig {
    std::vector<std::string> topic_set = TopicSet::default_set().names();
    int focused_per_topic = 2;
    int hybrid_per_topic = 1;
    int general_accounts = 1;
    std::int64_t tweets_total = 0;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    double drift_rate = 0.0;
    int vocab_size_per_topic = 40;
    int shared_vocab_size = 80;
    std::uint64_t seed = 0;
};

inline void validate_synth_config(const SynthConfig& cfg) {
    if (cfg.tweets_total <= 0) throw ValidationError("synth config: tweets_total must be > 0");
    if (cfg.end_ms <= cfg.start_ms)
        throw ValidationError("synth config: time_span end must be after start");
    if (cfg.drift_rate < 0) throw ValidationError("synth config: drift_rate must be >= 0");
    if (cfg.topic_set.empty()) throw ValidationError("synth config: topic_set is empty");
    if (cfg.vocab_size_per_topic < 2)
        throw ValidationError("synth config: vocab_size_per_topic must be >= 2");
    if (cfg.shared_vocab_size < 1)
        throw ValidationError("synth config: shared_vocab_size must be >= 1");
    if (cfg.focused_per_topic < 0 || cfg.hybrid_per_topic < 0 || cfg.general_accounts < 0)
        throw ValidationError("synth config: account counts must be >= 0");
    if (cfg.hybrid_per_topic > 0 && cfg.topic_set.size() < 2)
        throw ValidationError("synth config: hybrid accounts need at least two topics");
    if (cfg.focused_per_topic + cfg.hybrid_per_topic + cfg.general_accounts == 0)
        throw ValidationError("synth config: no accounts configured");
}

inline SynthConfig parse_synth_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("synth config must be a JSON object");
    SynthConfig cfg;
    auto require = [&](const char* key) -> const nlohmann::json& {
        auto it = doc.find(key);
        if (it == doc.end())
            throw ValidationError(std::string("synth config: missing field \"") + key + "\"");
        return *it;
    };
    if (doc.contains("topic_set")) {
        cfg.topic_set.clear();
        for (const auto& t : doc.at("topic_set")) cfg.topic_set.push_back(t.get<std::string>());
    }
    const auto& apt = require("accounts_per_type");
    if (!apt.is_object()) throw ValidationError("synth config: accounts_per_type must be an object");
    cfg.focused_per_topic = apt.value("focused", 0);
    cfg.hybrid_per_topic = apt.value("hybrid", 0);
    cfg.general_accounts = apt.value("general", 0);
    cfg.tweets_total = require("tweets_total").get<std::int64_t>();
    const auto& span = require("time_span");
    if (!span.is_array() || span.size() != 2)
        throw ValidationError("synth config: time_span must be [start_ms, end_ms]");
    cfg.start_ms = span[0].get<std::int64_t>();
    cfg.end_ms = span[1].get<std::int64_t>();
    cfg.drift_rate = require("drift_rate").get<double>();
    cfg.vocab_size_per_topic = require("vocab_size_per_topic").get<int>();
    cfg.shared_vocab_size = require("shared_vocab_size").get<int>();
    cfg.seed = require("seed").get<std::uint64_t>();
    return cfg;
}

inline nlohmann::ordered_json synth_config_to_json(const SynthConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["topic_set"] = cfg.topic_set;
    doc["accounts_per_type"] = {{"focused", cfg.focused_per_topic},
                                {"hybrid", cfg.hybrid_per_topic},
                                {"general", cfg.general_accounts}};
    doc["tweets_total"] = cfg.tweets_total;
    doc["time_span"] = {cfg.start_ms, cfg.end_ms};
    doc["drift_rate"] = cfg.drift_rate;
    doc["vocab_size_per_topic"] = cfg.vocab_size_per_topic;
    doc["shared_vocab_size"] = cfg.shared_vocab_size;
    doc["seed"] = cfg.seed;
    return doc;
}

namespace detail {

// Skewed index in [0, n): square of a uniform draws low indices more
// often, a crude frequency profile over a lexicon.
inline std::size_t skewed_index(Rng& rng, std::size_t n) {
    double u = rng.unit();
    auto idx = static_cast<std::size_t>(u * u * static_cast<double>(n));
    return idx >= n ? n - 1 : idx;
}

}  // namespace detail

/// Deterministically generate a synthetic corpus. Focused accounts emit
/// only their topic's tokens, hybrids pick one of their topics per
/// tweet, general accounts pick any topic. Each topic's tokens come from
/// a start lexicon (first half of its vocabulary) blending into an end
/// lexicon (second half) as time advances, rate set by drift_rate.
inline Corpus generate_synthetic(const SynthConfig& cfg) {
    validate_synth_config(cfg);
    const TopicSet topic_set(cfg.topic_set);
    const auto& topics = topic_set.names();
    const std::size_t n_topics = topics.size();

    AccountRegistry registry;
    std::vector<const Account*> account_order;  // creation order for sampling
    auto add_account = [&](Account acc) {
        auto [it, inserted] = registry.emplace(acc.handle, std::move(acc));
        if (!inserted) throw ValidationError("synth: duplicate generated handle");
        account_order.push_back(&it->second);
    };
    for (std::size_t t = 0; t < n_topics; ++t)
        for (int k = 0; k < cfg.focused_per_topic; ++k)
            add_account({"f_" + topics[t] + "_" + std::to_string(k),
                         StreamType::focused,
                         {topics[t]}});
    for (std::size_t t = 0; t < n_topics; ++t)
        for (int k = 0; k < cfg.hybrid_per_topic; ++k) {
            std::vector<std::string> pair{topics[t], topics[(t + 1) % n_topics]};
            std::sort(pair.begin(), pair.end());
            add_account({"h_" + topics[t] + "_" + std::to_string(k), StreamType::hybrid,
                         std::move(pair)});
        }
    for (int k = 0; k < cfg.general_accounts; ++k)
        add_account({"g_" + std::to_string(k), StreamType::general, {}});

    Rng rng(cfg.seed);
    const auto n = static_cast<std::size_t>(cfg.tweets_total);
    const auto span = static_cast<std::uint64_t>(cfg.end_ms - cfg.start_ms);

    std::vector<std::int64_t> timestamps(n);
    for (auto& ts : timestamps) ts = cfg.start_ms + static_cast<std::int64_t>(rng.below(span));
    std::sort(timestamps.begin(), timestamps.end());

    // Tweet lengths and the share of non-topical filler tokens; fixed
    // generator texture, not part of the config surface.
    constexpr int kMinTokens = 6;
    constexpr int kLenSpread = 6;
    constexpr double kSharedProb = 0.45;

    const auto vocab = static_cast<std::size_t>(cfg.vocab_size_per_topic);
    const std::size_t start_half = vocab / 2;
    const std::size_t end_half = vocab - start_half;

    int id_width = 1;
    for (std::size_t v = n; v >= 10; v /= 10) ++id_width;

    std::vector<Tweet> tweets;
    tweets.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Account& acc = *account_order[rng.below(account_order.size())];
        std::string_view topic;
        switch (acc.stream_type) {
            case StreamType::focused: topic = acc.topics[0]; break;
            case StreamType::hybrid: topic = acc.topics[rng.below(acc.topics.size())]; break;
            case StreamType::general: topic = topics[rng.below(n_topics)]; break;
        }
        const double tau = static_cast<double>(timestamps[j] - cfg.start_ms) /
                           static_cast<double>(cfg.end_ms - cfg.start_ms);
        const double alpha = std::min(1.0, cfg.drift_rate * tau);

        const auto len = static_cast<int>(kMinTokens + rng.below(kLenSpread));
        std::string text;
        for (int k = 0; k < len; ++k) {
            if (k) text += ' ';
            if (rng.unit() < kSharedProb) {
                text += "sh";
                text += std::to_string(
                    detail::skewed_index(rng, static_cast<std::size_t>(cfg.shared_vocab_size)));
            } else {
                const bool late = rng.unit() < alpha;
                const std::size_t idx = late
                                            ? start_half + detail::skewed_index(rng, end_half)
                                            : detail::skewed_index(rng, start_half);
                text += topic;
                text += 'w';
                text += std::to_string(idx);
            }
        }

        std::string id = std::to_string(j);
        id.insert(0, static_cast<std::size_t>(id_width) - id.size(), '0');
        tweets.push_back({"s" + id, timestamps[j], acc.handle, std::move(text)});
    }

    return build_corpus(std::move(tweets), std::move(registry), topic_set);
}

}  // namespace streamtopic

#endif
