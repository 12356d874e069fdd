#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "streamtopic/model_io.hpp"
#include "streamtopic/rng.hpp"

#include "test_util.hpp"

using namespace streamtopic;

namespace {

FeatureVector dense(std::vector<double> values) {
    FeatureVector fv;
    fv.dim = static_cast<std::uint32_t>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0.0) fv.entries.emplace_back(static_cast<std::uint32_t>(i), values[i]);
    return fv;
}

}  // namespace

TEST_CASE("lr bundle round trips bit-exactly") {
    Rng rng(11);
    std::vector<WeightedExample> examples;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> x(6);
        for (double& v : x) v = rng.unit() * 2.0 - 1.0;
        examples.push_back({dense(x), x[0] > 0, 1.0});
    }
    const std::vector<TokenList> docs{{"alpha", "beta"}, {"gamma"}, {"beta", "delta"}};

    LrBundle bundle;
    bundle.p = 10.0;
    bundle.seed = 3;
    bundle.trained_until = 123456789;
    TopicModel model;
    model.topic = "sports";
    model.tfidf = TfIdfModel::fit(docs);
    model.logistic = train_logistic(examples, {});
    model.train_max_timestamp = 123456789;
    bundle.models.push_back(model);

    sttest::TempDir dir;
    const auto path = dir.file("model.json");
    save_lr_bundle(bundle, path);
    const LrBundle back = load_lr_bundle(path);

    CHECK(back.p == bundle.p);
    CHECK(back.seed == bundle.seed);
    CHECK(back.trained_until == bundle.trained_until);
    REQUIRE(back.models.size() == 1);
    CHECK(back.models[0].topic == "sports");
    CHECK(back.models[0].tfidf.vocabulary() == model.tfidf.vocabulary());
    for (std::size_t i = 0; i < model.tfidf.vocab_size(); ++i)
        CHECK(back.models[0].tfidf.idf_at(i) == model.tfidf.idf_at(i));
    REQUIRE(back.models[0].logistic.weights().size() == model.logistic.weights().size());
    for (std::size_t i = 0; i < model.logistic.weights().size(); ++i)
        CHECK(back.models[0].logistic.weights()[i] == model.logistic.weights()[i]);
    CHECK(back.models[0].logistic.bias() == model.logistic.bias());
    CHECK(back.models[0].logistic.config().l2_lambda == model.logistic.config().l2_lambda);
    CHECK(back.models[0].logistic.config().decision_threshold ==
          model.logistic.config().decision_threshold);

    // saving the reloaded bundle reproduces the same bytes
    const auto path2 = dir.file("model2.json");
    save_lr_bundle(back, path2);
    CHECK(sttest::read_text(path2) == sttest::read_text(path));
}

TEST_CASE("nb bundle round trips bit-exactly") {
    const std::vector<TokenList> docs{{"win", "match"}, {"vote", "poll"}, {"win"}};
    NbBundle bundle;
    bundle.seed = 5;
    bundle.trained_until = 42;
    bundle.tfidf = TfIdfModel::fit(docs);
    std::vector<MulticlassCounts> counts{
        {bundle.tfidf.to_counts({"win", "match", "win"}), "sports"},
        {bundle.tfidf.to_counts({"vote", "poll"}), "politics"},
    };
    bundle.nb = train_nb(counts, 1.0);

    sttest::TempDir dir;
    const auto path = dir.file("nb.json");
    save_nb_bundle(bundle, path);
    const NbBundle back = load_nb_bundle(path);

    CHECK(back.nb.classes() == bundle.nb.classes());
    CHECK(back.nb.smoothing_alpha() == bundle.nb.smoothing_alpha());
    for (std::size_t c = 0; c < bundle.nb.classes().size(); ++c) {
        CHECK(back.nb.class_log_priors()[c] == bundle.nb.class_log_priors()[c]);
        for (std::size_t t = 0; t < bundle.nb.dim(); ++t)
            CHECK(back.nb.feature_log_likelihoods()[c][t] ==
                  bundle.nb.feature_log_likelihoods()[c][t]);
    }

    const auto path2 = dir.file("nb2.json");
    save_nb_bundle(back, path2);
    CHECK(sttest::read_text(path2) == sttest::read_text(path));
}

TEST_CASE("model_kind dispatches and rejects junk") {
    sttest::TempDir dir;
    const auto path = dir.file("junk.json");
    sttest::write_text(path, "{\"not_a\": \"model\"}");
    CHECK_THROWS_AS(model_kind(path), ValidationError);
    CHECK_THROWS_AS(load_lr_bundle(path), ValidationError);
    CHECK_THROWS_AS(load_nb_bundle(path), ValidationError);
}
