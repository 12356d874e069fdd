#ifndef STREAMTOPIC_CORPUS_HPP
#define STREAMTOPIC_CORPUS_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "streamtopic/errors.hpp"
#include "streamtopic/json_util.hpp"

namespace streamtopic {

/// One timestamped post from a named stream. Timestamps are epoch
/// milliseconds UTC; ties in a corpus are broken by id.
struct Tweet {
    std::string id;
    std::int64_t timestamp = 0;
    std::string account;
    std::string text;
};

inline bool chrono_less(const Tweet& a, const Tweet& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.id < b.id;
}

enum class StreamType { focused, hybrid, general };

inline std::string_view stream_type_name(StreamType t) {
    switch (t) {
        case StreamType::focused: return "focused";
        case StreamType::hybrid: return "hybrid";
        default: return "general";
    }
}

inline StreamType parse_stream_type(std::string_view s) {
    if (s == "focused") return StreamType::focused;
    if (s == "hybrid") return StreamType::hybrid;
    if (s == "general") return StreamType::general;
    throw ValidationError("unknown stream_type \"" + std::string(s) + "\"");
}

/// Stream registry entry. Invariants: focused accounts carry exactly one
/// topic, general accounts none, hybrid accounts at least two.
struct Account {
    std::string handle;
    StreamType stream_type = StreamType::general;
    std::vector<std::string> topics;  // lowercase, sorted, unique

    bool has_topic(std::string_view t) const {
        return std::binary_search(topics.begin(), topics.end(), t,
                                  [](std::string_view a, std::string_view b) { return a < b; });
    }
};

/// The closed, configurable set of topic labels. Names are compared
/// case-insensitively; they are normalized to lowercase on entry and the
/// configured order is preserved for reporting.
class TopicSet {
public:
    TopicSet() = default;

    explicit TopicSet(const std::vector<std::string>& names) {
        for (const auto& n : names) {
            std::string norm = to_lower_ascii(trim_copy(n));
            if (norm.empty()) throw ValidationError("empty topic name");
            if (lookup_.insert(norm).second) names_.push_back(norm);
        }
        if (names_.empty()) throw ValidationError("topic set is empty");
    }

    static const TopicSet& default_set() {
        static const TopicSet s{{"politics", "business", "health", "sports",
                                 "science", "technology", "entertainment"}};
        return s;
    }

    bool contains(std::string_view name) const {
        return lookup_.count(to_lower_ascii(name)) > 0;
    }

    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::set<std::string> lookup_;
};

using AccountRegistry = std::map<std::string, Account>;

/// Chronologically ordered tweets plus the account registry they resolve
/// against. Built via build_corpus; immutable afterwards.
struct Corpus {
    std::vector<Tweet> tweets;  // sorted ascending by (timestamp, id)
    AccountRegistry accounts;
    TopicSet topics;

    const Account& account_of(const Tweet& t) const { return accounts.at(t.account); }
};

struct TweetLoadResult {
    std::vector<Tweet> tweets;  // order as encountered; not yet sorted
    std::vector<RecordError> errors;
};

namespace detail {

inline bool get_string_field(const nlohmann::json& obj, const char* key, std::string& out,
                             std::string& why) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        why = std::string("missing field \"") + key + "\"";
        return false;
    }
    if (!it->is_string()) {
        why = std::string("field \"") + key + "\" is not a string";
        return false;
    }
    out = it->get<std::string>();
    return true;
}

inline bool get_int_field(const nlohmann::json& obj, const char* key, std::int64_t& out,
                          std::string& why) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        why = std::string("missing field \"") + key + "\"";
        return false;
    }
    if (!it->is_number_integer() && !it->is_number_unsigned()) {
        why = std::string("field \"") + key + "\" is not an integer";
        return false;
    }
    out = it->get<std::int64_t>();
    return true;
}

}  // namespace detail

/// Parse one JSON-lines tweet record. Returns false with a reason if the
/// record is malformed or breaks a Tweet invariant.
inline bool parse_tweet_record(std::string_view line, Tweet& out, std::string& why) {
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        why = "not a JSON object";
        return false;
    }
    if (!detail::get_string_field(obj, "id", out.id, why)) return false;
    if (!detail::get_int_field(obj, "created_at", out.timestamp, why)) return false;
    if (!detail::get_string_field(obj, "account", out.account, why)) return false;
    if (!detail::get_string_field(obj, "text", out.text, why)) return false;
    if (out.id.empty()) {
        why = "field \"id\" is empty";
        return false;
    }
    if (trim_copy(out.text).empty()) {
        why = "field \"text\" is empty after trimming";
        return false;
    }
    return true;
}

/// Load a JSON-lines tweet file. Well-formed lines become tweets;
/// malformed lines are reported with their line number, never dropped
/// silently. An unreadable file is fatal.
inline TweetLoadResult load_tweets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read tweet file: " + path.string());
    TweetLoadResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_copy(line).empty()) {
            result.errors.push_back({lineno, "blank line"});
            continue;
        }
        Tweet t;
        std::string why;
        if (parse_tweet_record(line, t, why))
            result.tweets.push_back(std::move(t));
        else
            result.errors.push_back({lineno, why});
    }
    return result;
}

inline void write_tweets(const std::vector<Tweet>& tweets, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write tweet file: " + path.string());
    for (const Tweet& t : tweets) {
        nlohmann::ordered_json obj;
        obj["id"] = t.id;
        obj["created_at"] = t.timestamp;
        obj["account"] = t.account;
        obj["text"] = t.text;
        out << obj.dump() << '\n';
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

inline void validate_account(const Account& acc) {
    if (acc.handle.empty()) throw ValidationError("account handle is empty");
    switch (acc.stream_type) {
        case StreamType::focused:
            if (acc.topics.size() != 1)
                throw ValidationError("account \"" + acc.handle +
                                      "\": focused stream must have exactly one topic");
            break;
        case StreamType::general:
            if (!acc.topics.empty())
                throw ValidationError("account \"" + acc.handle +
                                      "\": general stream must have no topics");
            break;
        case StreamType::hybrid:
            if (acc.topics.size() < 2)
                throw ValidationError("account \"" + acc.handle +
                                      "\": hybrid stream must have at least two topics");
            break;
    }
}

/// Load and validate the account registry (JSON array). Taxonomy
/// invariants and topic names are checked here; violations throw.
inline AccountRegistry load_accounts(const std::filesystem::path& path,
                                     const TopicSet& topic_set = TopicSet::default_set()) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read account registry: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array())
        throw ValidationError("account registry must be a JSON array: " + path.string());

    AccountRegistry registry;
    for (const auto& entry : doc) {
        if (!entry.is_object()) throw ValidationError("registry entry is not an object");
        std::string why;
        Account acc;
        std::string type_name;
        if (!detail::get_string_field(entry, "handle", acc.handle, why) ||
            !detail::get_string_field(entry, "stream_type", type_name, why))
            throw ValidationError("registry entry: " + why);
        acc.stream_type = parse_stream_type(type_name);

        auto it = entry.find("topics");
        if (it == entry.end() || !it->is_array())
            throw ValidationError("account \"" + acc.handle + "\": missing topics array");
        std::set<std::string> topics;
        for (const auto& t : *it) {
            if (!t.is_string())
                throw ValidationError("account \"" + acc.handle + "\": topic is not a string");
            std::string name = to_lower_ascii(trim_copy(t.get<std::string>()));
            if (!topic_set.contains(name))
                throw ValidationError("account \"" + acc.handle + "\": unknown topic \"" + name +
                                      "\"");
            topics.insert(name);
        }
        acc.topics.assign(topics.begin(), topics.end());
        validate_account(acc);
        if (!registry.emplace(acc.handle, acc).second)
            throw ValidationError("duplicate account handle \"" + acc.handle + "\"");
    }
    return registry;
}

inline void write_accounts(const AccountRegistry& registry, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write account registry: " + path.string());
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [handle, acc] : registry) {
        nlohmann::ordered_json obj;
        obj["handle"] = handle;
        obj["stream_type"] = std::string(stream_type_name(acc.stream_type));
        obj["topics"] = acc.topics;
        arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
    if (!out) throw ValidationError("write failed: " + path.string());
}

/// Assemble a validated Corpus: sorts by (timestamp, id), checks id
/// uniqueness and that every tweet's account resolves in the registry.
inline Corpus build_corpus(std::vector<Tweet> tweets, AccountRegistry registry,
                           TopicSet topic_set = TopicSet::default_set()) {
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(tweets.size());
    for (const Tweet& t : tweets) {
        if (!registry.count(t.account))
            throw ValidationError("tweet \"" + t.id + "\": unregistered account handle \"" +
                                  t.account + "\"");
        if (!seen_ids.insert(t.id).second)
            throw ValidationError("duplicate tweet id \"" + t.id + "\"");
    }
    std::sort(tweets.begin(), tweets.end(), chrono_less);
    return Corpus{std::move(tweets), std::move(registry), std::move(topic_set)};
}

/// Per-topic account and tweet counts, Table-2 style. Hybrid accounts
/// count once per topic they carry, so topic rows need not sum to the
/// totals. focused_tweets counts only tweets from accounts focused on
/// the row's topic.
struct CorpusStats {
    struct Row {
        std::string topic;
        std::size_t accounts = 0;
        std::size_t tweets = 0;
        std::size_t focused_tweets = 0;
    };
    std::vector<Row> rows;           // one per configured topic, in set order
    std::size_t total_accounts = 0;  // distinct accounts, all types
    std::size_t total_tweets = 0;    // distinct tweets
};

inline CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats stats;
    std::map<std::string, CorpusStats::Row> by_topic;
    for (const std::string& t : corpus.topics.names()) by_topic[t] = {t, 0, 0, 0};

    for (const auto& [handle, acc] : corpus.accounts)
        for (const std::string& t : acc.topics) {
            auto it = by_topic.find(t);
            if (it != by_topic.end()) ++it->second.accounts;
        }
    for (const Tweet& tw : corpus.tweets) {
        const Account& acc = corpus.account_of(tw);
        for (const std::string& t : acc.topics) {
            auto it = by_topic.find(t);
            if (it == by_topic.end()) continue;
            ++it->second.tweets;
            if (acc.stream_type == StreamType::focused) ++it->second.focused_tweets;
        }
    }
    for (const std::string& t : corpus.topics.names()) stats.rows.push_back(by_topic.at(t));
    stats.total_accounts = corpus.accounts.size();
    stats.total_tweets = corpus.tweets.size();
    return stats;
}

}  // namespace streamtopic

#endif
