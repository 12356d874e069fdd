#ifndef STREAMTOPIC_FEATURES_HPP
#define STREAMTOPIC_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "streamtopic/errors.hpp"
#include "streamtopic/json_util.hpp"

namespace streamtopic {

using TokenList = std::vector<std::string>;

struct TokenizerOptions {
    bool keep_mentions = true;
    bool keep_urls = true;
};

namespace detail {

inline bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool is_scheme_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '.' || c == '-';
}

// Decodes the code point at s[i]; advances i. Bytes that are not valid
// UTF-8 pass through one at a time.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        char32_t cp = (char32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
        i += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        char32_t cp = (char32_t(b0 & 0x0F) << 12) |
                      (char32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3F);
        i += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        char32_t cp = (char32_t(b0 & 0x07) << 18) |
                      (char32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
                      (char32_t(static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
                      (static_cast<unsigned char>(s[i + 3]) & 0x3F);
        i += 4;
        return cp;
    }
    ++i;
    return b0;
}

inline bool is_space_cp(char32_t cp) {
    switch (cp) {
        case U'\t': case U'\n': case U'\v': case U'\f': case U'\r': case U' ':
        case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Punctuation removable from token edges. ASCII punctuation plus common
// typographic marks seen in news tweets (curly quotes, dashes, ellipsis).
inline bool is_strippable_cp(char32_t cp) {
    if ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
        (cp >= 0x7B && cp <= 0x7E))
        return true;
    switch (cp) {
        case 0x00A1: case 0x00AB: case 0x00BB: case 0x00BF:
        case 0x2013: case 0x2014: case 0x2018: case 0x2019:
        case 0x201C: case 0x201D: case 0x2026:
            return true;
        default:
            return false;
    }
}

inline std::string strip_edge_punct(std::string_view piece) {
    // code point boundaries with strippability flags
    std::vector<std::pair<std::size_t, bool>> cps;  // (byte offset, strippable)
    std::size_t i = 0;
    while (i < piece.size()) {
        std::size_t at = i;
        char32_t cp = next_code_point(piece, i);
        cps.emplace_back(at, is_strippable_cp(cp));
    }
    std::size_t lo = 0, hi = cps.size();
    while (lo < hi && cps[lo].second) ++lo;
    while (hi > lo && cps[hi - 1].second) --hi;
    if (lo >= hi) return {};
    std::size_t begin = cps[lo].first;
    std::size_t end = hi < cps.size() ? cps[hi].first : piece.size();
    return std::string(piece.substr(begin, end - begin));
}

}  // namespace detail

/// Split a post into lowercase tokens. @mentions, #hashtags and URLs
/// survive as single tokens; everything else is split on whitespace and
/// stripped of leading/trailing punctuation (internal hyphens and
/// apostrophes are untouched). Total function: never throws.
inline TokenList tokenize(std::string_view text, const TokenizerOptions& opt = {}) {
    const std::string lower = to_lower_ascii(text);
    TokenList tokens;
    std::string pending;
    auto flush = [&] {
        if (!pending.empty()) {
            std::string t = detail::strip_edge_punct(pending);
            if (!t.empty()) tokens.push_back(std::move(t));
            pending.clear();
        }
    };

    const std::size_t n = lower.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = lower[i];
        if ((c == '@' || c == '#') && i + 1 < n && detail::is_word_char(lower[i + 1])) {
            flush();
            std::size_t j = i + 1;
            while (j < n && detail::is_word_char(lower[j])) ++j;
            if (c == '#' || opt.keep_mentions) tokens.push_back(lower.substr(i, j - i));
            i = j;
            continue;
        }
        if (c >= 'a' && c <= 'z') {
            std::size_t j = i;
            while (j < n && detail::is_scheme_char(lower[j])) ++j;
            if (j > i && j + 2 < n && lower[j] == ':' && lower[j + 1] == '/' &&
                lower[j + 2] == '/') {
                std::size_t k = j + 3;
                while (k < n) {
                    std::size_t probe = k;
                    if (detail::is_space_cp(detail::next_code_point(lower, probe))) break;
                    k = probe;
                }
                if (k > j + 3) {
                    flush();
                    if (opt.keep_urls) tokens.push_back(lower.substr(i, k - i));
                    i = k;
                    continue;
                }
            }
        }
        std::size_t next = i;
        char32_t cp = detail::next_code_point(lower, next);
        if (detail::is_space_cp(cp))
            flush();
        else
            pending.append(lower, i, next - i);
        i = next;
    }
    flush();
    return tokens;
}

/// Sparse feature vector: (index, value) pairs with strictly increasing
/// indices over a fixed dimension. TF-IDF transforms produce unit-norm
/// vectors; raw count vectors reuse the same shape.
struct FeatureVector {
    std::uint32_t dim = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;

    double norm() const {
        double s = 0;
        for (const auto& [i, v] : entries) s += v * v;
        return std::sqrt(s);
    }
};

/// Vocabulary with smoothed inverse document frequencies, fitted on
/// training documents only. idf(t) = ln((1 + D) / (1 + df(t))) + 1;
/// vocabulary indices follow lexicographic token order.
class TfIdfModel {
public:
    TfIdfModel() = default;

    static TfIdfModel fit(const std::vector<TokenList>& docs, int min_df = 1) {
        if (min_df < 1) throw ValidationError("tf-idf: min_df must be >= 1");
        std::map<std::string, int> df;
        bool any_nonempty = false;
        std::vector<std::string_view> uniq;
        for (const TokenList& doc : docs) {
            if (doc.empty()) continue;
            any_nonempty = true;
            uniq.assign(doc.begin(), doc.end());
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            for (std::string_view t : uniq) ++df[std::string(t)];
        }
        if (!any_nonempty) throw ValidationError("tf-idf: all documents are empty");

        TfIdfModel model;
        model.doc_count_ = static_cast<int>(docs.size());
        model.min_df_ = min_df;
        for (const auto& [token, count] : df) {
            if (count < min_df) continue;
            model.vocab_.push_back(token);
            model.idf_.push_back(std::log((1.0 + model.doc_count_) / (1.0 + count)) + 1.0);
        }
        model.rebuild_index();
        return model;
    }

    /// TF-IDF transform: count(t) * idf(t), L2-normalized. Tokens outside
    /// the vocabulary are ignored; an all-OOV document maps to the empty
    /// vector.
    FeatureVector transform(const TokenList& doc) const {
        FeatureVector fv = to_counts(doc);
        double sq = 0;
        for (auto& [idx, value] : fv.entries) {
            value *= idf_[idx];
            sq += value * value;
        }
        if (sq > 0) {
            const double inv = 1.0 / std::sqrt(sq);
            for (auto& [idx, value] : fv.entries) value *= inv;
        }
        return fv;
    }

    /// Raw in-vocabulary term counts (the multinomial NB input).
    FeatureVector to_counts(const TokenList& doc) const {
        std::map<std::string_view, std::uint32_t> counts;
        for (const std::string& t : doc) ++counts[t];
        FeatureVector fv;
        fv.dim = static_cast<std::uint32_t>(vocab_.size());
        for (const auto& [token, count] : counts) {
            auto it = index_.find(token);
            if (it == index_.end()) continue;
            fv.entries.emplace_back(it->second, static_cast<double>(count));
        }
        // map iteration is lexicographic and so is the vocabulary, so
        // indices come out strictly increasing already
        return fv;
    }

    std::size_t vocab_size() const { return vocab_.size(); }
    const std::vector<std::string>& vocabulary() const { return vocab_; }
    double idf_at(std::size_t i) const { return idf_[i]; }
    int doc_count() const { return doc_count_; }
    int min_df() const { return min_df_; }

    std::string to_json() const {
        std::string out = "{\"doc_count\": " + std::to_string(doc_count_) +
                          ", \"min_df\": " + std::to_string(min_df_) + ", \"terms\": [";
        for (std::size_t i = 0; i < vocab_.size(); ++i) {
            if (i) out += ", ";
            out += "[" + json_quote(vocab_[i]) + ", " + format_double17(idf_[i]) + "]";
        }
        out += "]}";
        return out;
    }

    static TfIdfModel from_json(const nlohmann::json& doc) {
        TfIdfModel model;
        model.doc_count_ = doc.at("doc_count").get<int>();
        model.min_df_ = doc.at("min_df").get<int>();
        for (const auto& term : doc.at("terms")) {
            model.vocab_.push_back(term.at(0).get<std::string>());
            model.idf_.push_back(term.at(1).get<double>());
        }
        for (std::size_t i = 1; i < model.vocab_.size(); ++i)
            if (!(model.vocab_[i - 1] < model.vocab_[i]))
                throw ValidationError("tf-idf model: terms not in lexicographic order");
        model.rebuild_index();
        return model;
    }

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    void rebuild_index() {
        index_.clear();
        index_.reserve(vocab_.size());
        for (std::size_t i = 0; i < vocab_.size(); ++i)
            index_.emplace(vocab_[i], static_cast<std::uint32_t>(i));
    }

    std::vector<std::string> vocab_;  // lexicographic
    std::vector<double> idf_;
    std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> index_;
    int doc_count_ = 0;
    int min_df_ = 1;
};

}  // namespace streamtopic

#endif
