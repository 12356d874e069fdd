// streamtopic command-line front end: validate/synthesize corpora, train
// distantly-supervised topic classifiers, classify streams, and run the
// window/weighting experiments.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 runtime failure. The last stderr line is always a status line.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamtopic/streamtopic.hpp"

namespace st = streamtopic;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

st::TopicSet topic_set_from_flag(const std::vector<std::string>& names) {
    if (names.empty()) return st::TopicSet::default_set();
    return st::TopicSet(names);
}

st::Corpus load_corpus(const std::string& tweets_path, const std::string& accounts_path,
                       const st::TopicSet& topics, bool report_record_errors) {
    st::AccountRegistry registry = st::load_accounts(accounts_path, topics);
    st::TweetLoadResult loaded = st::load_tweets(tweets_path);
    if (report_record_errors)
        for (const st::RecordError& e : loaded.errors)
            std::cout << "record error: line " << e.line << ": " << e.message << "\n";
    if (!loaded.errors.empty() && loaded.tweets.empty())
        throw st::ValidationError("no usable tweet records in " + tweets_path);
    return st::build_corpus(std::move(loaded.tweets), std::move(registry), topics);
}

int cmd_validate(const std::string& tweets_path, const std::string& accounts_path,
                 const std::vector<std::string>& topic_names) {
    const st::TopicSet topics = topic_set_from_flag(topic_names);
    const st::Corpus corpus = load_corpus(tweets_path, accounts_path, topics, true);
    const st::CorpusStats stats = st::corpus_stats(corpus);

    std::cout << "topic           accounts    tweets   focused_tweets\n";
    for (const auto& row : stats.rows) {
        std::cout << row.topic;
        for (std::size_t i = row.topic.size(); i < 16; ++i) std::cout << ' ';
        std::cout << row.accounts << "    " << row.tweets << "   " << row.focused_tweets << "\n";
    }
    std::cout << "total accounts: " << stats.total_accounts
              << "\ntotal tweets: " << stats.total_tweets << "\n";
    return 0;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) throw st::ValidationError("cannot read synth config: " + config_path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw st::ValidationError("synth config is not valid JSON");
    const st::SynthConfig cfg = st::parse_synth_config(doc);
    const st::Corpus corpus = st::generate_synthetic(cfg);

    fs::create_directories(out_dir);
    st::write_tweets(corpus.tweets, fs::path(out_dir) / "tweets.jsonl");
    st::write_accounts(corpus.accounts, fs::path(out_dir) / "accounts.json");
    std::cout << "wrote " << corpus.tweets.size() << " tweets and " << corpus.accounts.size()
              << " accounts to " << out_dir << "\n";
    return 0;
}

st::LrBundle train_lr_topics(const st::Corpus& corpus, const std::vector<std::string>& topics,
                             double p, std::uint64_t seed) {
    st::LrBundle bundle;
    bundle.p = p;
    bundle.seed = seed;
    for (const std::string& topic : topics) {
        st::NegativeSamplingConfig sampling;
        sampling.seed = st::Rng::derive(seed, "train:" + topic);
        std::vector<st::LabeledExample> dataset = st::build_binary_dataset(corpus, topic, sampling);
        bool has_pos = false, has_neg = false;
        for (const auto& ex : dataset) (ex.positive ? has_pos : has_neg) = true;
        if (!has_pos)
            throw st::ValidationError("topic \"" + topic + "\" has no focused-account tweets");
        if (!has_neg)
            throw st::ValidationError("topic \"" + topic + "\" has an empty negative pool");

        std::vector<st::TokenList> docs;
        docs.reserve(dataset.size());
        for (const auto& ex : dataset) docs.push_back(st::tokenize(ex.text));
        st::TopicModel model;
        model.topic = topic;
        model.tfidf = st::TfIdfModel::fit(docs);

        const std::vector<double> weights =
            p == 1.0 ? std::vector<double>(dataset.size(), 1.0)
                     : st::recency_weights(dataset.size(), {p});
        std::vector<st::WeightedExample> examples(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            examples[i] = {model.tfidf.transform(docs[i]), dataset[i].positive, weights[i]};
            model.train_max_timestamp = std::max(model.train_max_timestamp, dataset[i].timestamp);
        }
        model.logistic = st::train_logistic(examples);
        bundle.trained_until = std::max(bundle.trained_until, model.train_max_timestamp);
        bundle.models.push_back(std::move(model));
    }
    return bundle;
}

st::NbBundle train_nb_all(const st::Corpus& corpus, std::uint64_t seed) {
    std::vector<st::MulticlassExample> dataset = st::build_multiclass_dataset(corpus);
    if (dataset.empty()) throw st::ValidationError("no focused-account tweets to train on");

    std::vector<st::TokenList> docs;
    docs.reserve(dataset.size());
    st::NbBundle bundle;
    bundle.seed = seed;
    for (const auto& ex : dataset) {
        docs.push_back(st::tokenize(ex.text));
        bundle.trained_until = std::max(bundle.trained_until, ex.timestamp);
    }
    bundle.tfidf = st::TfIdfModel::fit(docs);
    std::vector<st::MulticlassCounts> counts(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        counts[i] = {bundle.tfidf.to_counts(docs[i]), dataset[i].label};
    bundle.nb = st::train_nb(counts);
    return bundle;
}

int cmd_train(const std::string& tweets_path, const std::string& accounts_path,
              const std::string& topic, const std::string& model_kind, double p,
              std::uint64_t seed, const std::string& out_path,
              const std::vector<std::string>& topic_names) {
    const st::TopicSet topics = topic_set_from_flag(topic_names);
    const st::Corpus corpus = load_corpus(tweets_path, accounts_path, topics, false);

    if (model_kind == "nb") {
        if (topic != "all")
            throw UsageError("naive bayes is multi-class only; use --topic all");
        if (p != 1.0) throw UsageError("--p applies to logistic training only");
        st::save_nb_bundle(train_nb_all(corpus, seed), out_path);
    } else {
        std::vector<std::string> wanted;
        if (topic == "all")
            wanted = topics.names();
        else if (topics.contains(topic))
            wanted.push_back(st::to_lower_ascii(topic));
        else
            throw st::ValidationError("unknown topic \"" + topic + "\"");
        st::save_lr_bundle(train_lr_topics(corpus, wanted, p, seed), out_path);
    }
    std::cout << "wrote model to " << out_path << "\n";
    return 0;
}

int cmd_classify(const std::string& model_path, const std::string& tweets_path,
                 const std::string& out_path) {
    st::TweetLoadResult loaded = st::load_tweets(tweets_path);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw st::ValidationError("cannot write output: " + out_path);
        out = &file;
    }

    const std::string kind = st::model_kind(model_path);
    if (kind == "lr") {
        const st::LrBundle bundle = st::load_lr_bundle(model_path);
        for (const st::Tweet& tw : loaded.tweets) {
            const st::TokenList tokens = st::tokenize(tw.text);
            std::string scores, labels;
            for (const st::TopicModel& m : bundle.models) {
                const double proba = m.logistic.predict_proba(m.tfidf.transform(tokens));
                if (!scores.empty()) scores += ", ";
                scores += st::json_quote(m.topic) + ": " + st::format_double17(proba);
                if (proba >= m.logistic.config().decision_threshold) {
                    if (!labels.empty()) labels += ", ";
                    labels += st::json_quote(m.topic);
                }
            }
            *out << "{\"id\": " << st::json_quote(tw.id) << ", \"topic_scores\": {" << scores
                 << "}, \"topics\": [" << labels << "]}\n";
        }
    } else if (kind == "nb") {
        const st::NbBundle bundle = st::load_nb_bundle(model_path);
        for (const st::Tweet& tw : loaded.tweets) {
            const st::FeatureVector counts = bundle.tfidf.to_counts(st::tokenize(tw.text));
            const st::NbPrediction pred = st::nb_predict(bundle.nb, counts);
            // normalized posteriors via a stable softmax over the scores
            double max_lp = pred.log_posteriors[0];
            for (double lp : pred.log_posteriors) max_lp = std::max(max_lp, lp);
            double z = 0;
            for (double lp : pred.log_posteriors) z += std::exp(lp - max_lp);
            std::string scores;
            for (std::size_t c = 0; c < bundle.nb.classes().size(); ++c) {
                if (!scores.empty()) scores += ", ";
                scores += st::json_quote(bundle.nb.classes()[c]) + ": " +
                          st::format_double17(std::exp(pred.log_posteriors[c] - max_lp) / z);
            }
            *out << "{\"id\": " << st::json_quote(tw.id) << ", \"topic_scores\": {" << scores
                 << "}, \"topics\": [" << st::json_quote(pred.label) << "]}\n";
        }
    } else {
        throw st::ValidationError("unknown model kind \"" + kind + "\"");
    }
    return 0;
}

struct ExperimentConfigFile {
    std::string experiment;
    std::vector<std::string> topics;
    std::vector<double> sizes;
    double R = 0;  // 0 = absent; defaults to 0.5 (noisy) / 0.6 (gold)
    double p = 10.0;
    std::string eval = "noisy";
    std::uint64_t seed = 0;
};

ExperimentConfigFile parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read experiment config: " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw UsageError("experiment config is not a JSON object");
    ExperimentConfigFile cfg;
    try {
        cfg.experiment = doc.at("experiment").get<std::string>();
        if (doc.contains("topics")) cfg.topics = doc.at("topics").get<std::vector<std::string>>();
        if (doc.contains("sizes")) cfg.sizes = doc.at("sizes").get<std::vector<double>>();
        if (doc.contains("R")) cfg.R = doc.at("R").get<double>();
        if (doc.contains("p")) cfg.p = doc.at("p").get<double>();
        if (doc.contains("eval")) cfg.eval = doc.at("eval").get<std::string>();
        if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("experiment config: ") + e.what());
    }
    if (cfg.experiment != "growing" && cfg.experiment != "sliding" &&
        cfg.experiment != "weighting")
        throw UsageError("experiment must be growing, sliding or weighting");
    if (cfg.eval != "noisy" && cfg.eval != "gold")
        throw UsageError("eval must be noisy or gold");
    return cfg;
}

int cmd_experiment(const std::string& config_path, const std::string& tweets_path,
                   const std::string& accounts_path, const std::string& gold_path,
                   const std::string& out_csv, const std::vector<std::string>& topic_names) {
    const ExperimentConfigFile cfg = parse_experiment_config(config_path);
    const st::TopicSet topics = topic_set_from_flag(topic_names);
    const st::Corpus corpus = load_corpus(tweets_path, accounts_path, topics, false);

    st::ExperimentPlan plan;
    if (cfg.eval == "gold") {
        if (gold_path.empty()) throw UsageError("gold evaluation requires --gold");
        plan = st::make_gold_plan(corpus, st::load_gold(gold_path, topics));
    } else {
        plan = st::make_noisy_plan(corpus);
    }

    std::vector<std::string> exp_topics = cfg.topics.empty() ? topics.names() : cfg.topics;
    st::ExperimentOptions opts;
    opts.sampling.seed = cfg.seed;

    st::MetricsReport report;
    if (cfg.experiment == "growing") {
        std::vector<double> sizes =
            cfg.sizes.empty() ? std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0} : cfg.sizes;
        report = st::run_growing_window(corpus, exp_topics, sizes, plan, opts);
    } else if (cfg.experiment == "sliding") {
        const double R = cfg.R > 0 ? cfg.R : (cfg.eval == "gold" ? 0.6 : 0.5);
        std::vector<double> offsets =
            cfg.sizes.empty() ? std::vector<double>{0.0, 0.125, 0.25, 0.375, 0.5} : cfg.sizes;
        report = st::run_sliding_window(corpus, exp_topics, R, offsets, plan, opts);
    } else {
        st::WeightingResult result =
            st::run_weighting_delta(corpus, exp_topics, cfg.p, plan, opts);
        report = std::move(result.rows);
        for (const st::WeightingDelta& d : result.deltas)
            std::cout << "delta_f1 " << d.topic << " " << st::format_fixed6(d.delta) << "\n";
    }
    st::export_results(report, out_csv);
    std::cout << "wrote " << report.size() << " result rows to " << out_csv << "\n";
    return 0;
}

int cmd_report(const std::string& in_csv) {
    const st::MetricsReport report = st::parse_results_csv(in_csv);
    if (report.empty()) throw st::ValidationError("results CSV has no data rows");

    std::map<std::string, std::pair<const st::MetricsRow*, const st::MetricsRow*>> extremes;
    for (const st::MetricsRow& row : report) {
        auto& [best, worst] = extremes[row.topic];
        if (!best || row.metrics.f1 > best->metrics.f1) best = &row;
        if (!worst || row.metrics.f1 < worst->metrics.f1) worst = &row;
    }
    for (const auto& [topic, pair] : extremes) {
        const auto describe = [](const st::MetricsRow& r) {
            return r.experiment + " window start=" + st::format_fixed6(r.window_start_frac) +
                   " size=" + st::format_fixed6(r.window_size_frac) +
                   " p=" + st::format_fixed6(r.p) + " f1=" + st::format_fixed6(r.metrics.f1);
        };
        std::cout << topic << " best:  " << describe(*pair.first) << "\n";
        std::cout << topic << " worst: " << describe(*pair.second) << "\n";
    }

    // paired weighting rows: print the F1 deltas
    std::map<std::string, std::pair<const st::MetricsRow*, const st::MetricsRow*>> weighting;
    for (const st::MetricsRow& row : report) {
        if (row.experiment != "weighting") continue;
        auto& [unweighted, weighted] = weighting[row.topic];
        if (row.p == 1.0)
            unweighted = &row;
        else
            weighted = &row;
    }
    for (const auto& [topic, pair] : weighting)
        if (pair.first && pair.second)
            std::cout << topic << " delta_f1: "
                      << st::format_fixed6(pair.second->metrics.f1 - pair.first->metrics.f1)
                      << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distant-supervision topic classification for curated streams"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for all randomized steps");

    std::string tweets_path, accounts_path, gold_path, config_path, out_path, in_path,
        model_path;
    std::string topic = "all", model_kind = "lr";
    double p = 1.0;
    std::vector<std::string> topic_names;

    CLI::App* validate = app.add_subcommand("validate", "load and summarize a corpus");
    validate->add_option("--tweets", tweets_path, "tweet JSON-lines file")->required();
    validate->add_option("--accounts", accounts_path, "account registry JSON")->required();
    validate->add_option("--topics", topic_names, "override the topic set")->delimiter(',');

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--config", config_path, "synthesis config JSON")->required();
    synth->add_option("--out", out_path, "output directory")->required();

    CLI::App* train = app.add_subcommand("train", "train topic classifiers");
    train->add_option("--tweets", tweets_path)->required();
    train->add_option("--accounts", accounts_path)->required();
    train->add_option("--topic", topic, "topic name or 'all'");
    train->add_option("--model", model_kind, "lr or nb")->check(CLI::IsMember({"lr", "nb"}));
    train->add_option("--p", p, "recency weight of the newest example (1 = unweighted)");
    train->add_option("--out", out_path, "model output file")->required();
    train->add_option("--topics", topic_names, "override the topic set")->delimiter(',');

    CLI::App* classify = app.add_subcommand("classify", "tag tweets with topic decisions");
    classify->add_option("--model", model_path, "model bundle file")->required();
    classify->add_option("--tweets", tweets_path)->required();
    classify->add_option("--out", out_path, "output file (default: stdout)");

    CLI::App* experiment = app.add_subcommand("experiment", "run a window/weighting experiment");
    experiment->add_option("--config", config_path, "experiment config JSON")->required();
    experiment->add_option("--tweets", tweets_path)->required();
    experiment->add_option("--accounts", accounts_path)->required();
    experiment->add_option("--gold", gold_path, "gold JSON-lines file (eval=gold)");
    experiment->add_option("--out", out_path, "results CSV path")->required();
    experiment->add_option("--topics", topic_names, "override the topic set")->delimiter(',');

    CLI::App* report = app.add_subcommand("report", "summarize a results CSV");
    report->add_option("--in", in_path, "results CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) {  // --help
            std::cerr << "streamtopic: ok\n";
            return 0;
        }
        std::cerr << "streamtopic: usage error\n";
        return 1;
    }

    try {
        int rc = 0;
        if (*validate)
            rc = cmd_validate(tweets_path, accounts_path, topic_names);
        else if (*synth)
            rc = cmd_synth(config_path, out_path);
        else if (*train)
            rc = cmd_train(tweets_path, accounts_path, topic, model_kind, p, seed, out_path,
                           topic_names);
        else if (*classify)
            rc = cmd_classify(model_path, tweets_path, out_path);
        else if (*experiment)
            rc = cmd_experiment(config_path, tweets_path, accounts_path, gold_path, out_path,
                                topic_names);
        else if (*report)
            rc = cmd_report(in_path);
        std::cerr << "streamtopic: ok\n";
        return rc;
    } catch (const UsageError& e) {
        std::cerr << "streamtopic: usage error: " << e.what() << "\n";
        return 1;
    } catch (const st::ValidationError& e) {
        std::cerr << "streamtopic: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "streamtopic: failure: " << e.what() << "\n";
        return 3;
    }
}
