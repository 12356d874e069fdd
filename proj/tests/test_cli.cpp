#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <json.hpp>

#include "streamtopic/synth.hpp"

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = STREAMTOPIC_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_capture(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = kCli + " " + args + " >" + stdout_file.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string synth_config_json(std::uint64_t seed, std::int64_t total, double drift) {
    streamtopic::SynthConfig cfg;
    cfg.topic_set = {"politics", "sports", "technology"};
    cfg.tweets_total = total;
    cfg.start_ms = 0;
    cfg.end_ms = 5'000'000;
    cfg.drift_rate = drift;
    cfg.vocab_size_per_topic = 20;
    cfg.shared_vocab_size = 30;
    cfg.seed = seed;
    return streamtopic::synth_config_to_json(cfg).dump(2);
}

struct Fixture {
    sttest::TempDir dir;
    fs::path tweets, accounts;

    explicit Fixture(std::uint64_t seed = 4, std::int64_t total = 900, double drift = 1.0) {
        const fs::path cfg = dir.file("synth.json");
        sttest::write_text(cfg, synth_config_json(seed, total, drift));
        const fs::path out = dir.file("corpus");
        REQUIRE(run("synth --config " + cfg.string() + " --out " + out.string()) == 0);
        tweets = out / "tweets.jsonl";
        accounts = out / "accounts.json";
    }
};

}  // namespace

TEST_CASE("cli validate succeeds on a synthesized corpus") {
    Fixture fx;
    CHECK(run("validate --tweets " + fx.tweets.string() + " --accounts " +
              fx.accounts.string() + " --topics politics,sports,technology") == 0);
}

TEST_CASE("cli validate exit codes on bad input") {
    Fixture fx;
    CHECK(run("validate --tweets /nonexistent.jsonl --accounts " + fx.accounts.string() +
              " --topics politics,sports,technology") == 2);

    const fs::path bad = fx.dir.file("bad_accounts.json");
    sttest::write_text(bad, R"([{"handle":"X","stream_type":"focused","topics":["a","b"]}])");
    CHECK(run("validate --tweets " + fx.tweets.string() + " --accounts " + bad.string()) == 2);
}

TEST_CASE("cli rejects unknown flags and missing subcommands") {
    CHECK(run("validate --tweets a --accounts b --bogus") == 1);
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
}

TEST_CASE("cli synth is deterministic and rejects invalid configs") {
    sttest::TempDir dir;
    const fs::path cfg = dir.file("synth.json");
    sttest::write_text(cfg, synth_config_json(12, 300, 0.5));

    const fs::path out1 = dir.file("c1");
    const fs::path out2 = dir.file("c2");
    REQUIRE(run("synth --config " + cfg.string() + " --out " + out1.string()) == 0);
    REQUIRE(run("synth --config " + cfg.string() + " --out " + out2.string()) == 0);
    CHECK(sttest::read_text(out1 / "tweets.jsonl") == sttest::read_text(out2 / "tweets.jsonl"));
    CHECK(sttest::read_text(out1 / "accounts.json") ==
          sttest::read_text(out2 / "accounts.json"));

    const fs::path bad = dir.file("bad.json");
    sttest::write_text(bad, synth_config_json(12, 0, 0.5));  // tweets_total = 0
    CHECK(run("synth --config " + bad.string() + " --out " + dir.file("c3").string()) == 2);
}

TEST_CASE("cli train writes a model and p=1 matches the default exactly") {
    Fixture fx;
    const fs::path m1 = fx.dir.file("m1.json");
    const fs::path m2 = fx.dir.file("m2.json");
    const std::string base = "train --tweets " + fx.tweets.string() + " --accounts " +
                             fx.accounts.string() +
                             " --topics politics,sports,technology --topic sports --model lr";
    REQUIRE(run(base + " --out " + m1.string()) == 0);
    REQUIRE(run(base + " --p 1 --out " + m2.string()) == 0);
    CHECK(sttest::read_text(m1) == sttest::read_text(m2));

    const auto parsed = nlohmann::json::parse(sttest::read_text(m1));
    CHECK(parsed.at("model") == "lr");
    CHECK(parsed.at("topics").contains("sports"));
}

TEST_CASE("cli train usage and validation errors") {
    Fixture fx;
    const std::string common = " --tweets " + fx.tweets.string() + " --accounts " +
                               fx.accounts.string() + " --topics politics,sports,technology";
    // naive bayes is multi-class only
    CHECK(run("train" + common + " --topic sports --model nb --out " +
              fx.dir.file("x.json").string()) == 1);
    // default topic set has no focused accounts in this corpus
    CHECK(run("train --tweets " + fx.tweets.string() + " --accounts " + fx.accounts.string() +
              " --topic health --model lr --out " + fx.dir.file("y.json").string()) == 2);
}

TEST_CASE("cli classify tags tweets with scores and labels") {
    Fixture fx;
    const fs::path model = fx.dir.file("model.json");
    REQUIRE(run("train --tweets " + fx.tweets.string() + " --accounts " + fx.accounts.string() +
                " --topics politics,sports,technology --topic all --model lr --out " +
                model.string()) == 0);

    const fs::path out = fx.dir.file("tagged.jsonl");
    REQUIRE(run("classify --model " + model.string() + " --tweets " + fx.tweets.string() +
                " --out " + out.string()) == 0);

    std::istringstream lines(sttest::read_text(out));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        const auto obj = nlohmann::json::parse(line);
        CHECK(obj.contains("id"));
        CHECK(obj.at("topic_scores").size() == 3);
        CHECK(obj.contains("topics"));
        ++rows;
    }
    CHECK(rows == 900);
}

TEST_CASE("cli classify with a zero-weight model yields probability 0.5") {
    Fixture fx;
    // hand-written bundle: one topic, one vocab term, zero weights
    const fs::path model = fx.dir.file("zero.json");
    sttest::write_text(model, R"({"model": "lr", "p": 1, "seed": 0, "trained_until": 0,
      "topics": {"sports": {
        "tfidf": {"doc_count": 1, "min_df": 1, "terms": [["ball", 1.0]]},
        "logistic": {"bias": 0.0, "l2_lambda": 1.0, "max_iters": 1000,
                     "tolerance": 1e-06, "decision_threshold": 0.5,
                     "weights": [0.0]}}}})");

    const fs::path out = fx.dir.file("tagged.jsonl");
    REQUIRE(run_capture("classify --model " + model.string() + " --tweets " +
                            fx.tweets.string() + " --out " + out.string(),
                        fx.dir.file("stdout.txt")) == 0);
    std::istringstream lines(sttest::read_text(out));
    std::string line;
    while (std::getline(lines, line)) {
        const auto obj = nlohmann::json::parse(line);
        CHECK(obj.at("topic_scores").at("sports").get<double>() == 0.5);
    }
}

TEST_CASE("cli experiment runs each kind and writes the results CSV") {
    Fixture fx(5, 1200, 1.2);
    const std::string common = " --tweets " + fx.tweets.string() + " --accounts " +
                               fx.accounts.string() + " --topics politics,sports,technology";

    SECTION("growing") {
        const fs::path cfg = fx.dir.file("exp.json");
        sttest::write_text(cfg, R"({"experiment":"growing","topics":["sports"],)"
                                R"("sizes":[0.5,1.0],"eval":"noisy","seed":3})");
        const fs::path csv = fx.dir.file("out.csv");
        REQUIRE(run("experiment --config " + cfg.string() + common + " --out " + csv.string()) ==
                0);
        const std::string text = sttest::read_text(csv);
        CHECK(text.find("growing,sports") != std::string::npos);
    }
    SECTION("weighting with p=10 produces paired delta rows") {
        const fs::path cfg = fx.dir.file("exp.json");
        sttest::write_text(cfg, R"({"experiment":"weighting","p":10,"eval":"noisy","seed":3})");
        const fs::path csv = fx.dir.file("out.csv");
        REQUIRE(run("experiment --config " + cfg.string() + common + " --out " + csv.string()) ==
                0);
        const std::string text = sttest::read_text(csv);
        CHECK(text.find("weighting,sports,0.000000,1.000000,1.000000") != std::string::npos);
        CHECK(text.find("weighting,sports,0.000000,1.000000,10.000000") != std::string::npos);
        CHECK(text.find("weighting,all") != std::string::npos);
    }
    SECTION("sliding defaults to R=0.5 for noisy evaluation") {
        const fs::path cfg = fx.dir.file("exp.json");
        sttest::write_text(cfg, R"({"experiment":"sliding","topics":["sports"],)"
                                R"("sizes":[0.0,0.5],"eval":"noisy","seed":3})");
        const fs::path csv = fx.dir.file("out.csv");
        REQUIRE(run("experiment --config " + cfg.string() + common + " --out " + csv.string()) ==
                0);
        const std::string text = sttest::read_text(csv);
        CHECK(text.find("sliding,sports,0.000000,0.500000") != std::string::npos);
        CHECK(text.find("sliding,sports,0.500000,0.500000") != std::string::npos);
    }
    SECTION("sliding defaults to R=0.6 for gold evaluation") {
        const fs::path gold = fx.dir.file("gold.jsonl");
        sttest::write_text(
            gold,
            R"({"id":"g1","created_at":4500000,"account":"x","text":"sportsw11 sportsw12","labels":["sports"]})"
            "\n"
            R"({"id":"g2","created_at":4600000,"account":"x","text":"sh1 sh2","labels":["other"]})"
            "\n");
        const fs::path cfg = fx.dir.file("exp.json");
        sttest::write_text(cfg, R"({"experiment":"sliding","topics":["sports"],)"
                                R"("sizes":[0.0,0.4],"eval":"gold","seed":3})");
        const fs::path csv = fx.dir.file("out.csv");
        REQUIRE(run("experiment --config " + cfg.string() + common + " --gold " + gold.string() +
                    " --out " + csv.string()) == 0);
        const std::string text = sttest::read_text(csv);
        CHECK(text.find("sliding,sports,0.000000,0.600000") != std::string::npos);
    }
    SECTION("malformed config is a usage error") {
        const fs::path cfg = fx.dir.file("exp.json");
        sttest::write_text(cfg, R"({"experiment":"nope"})");
        CHECK(run("experiment --config " + cfg.string() + common + " --out " +
                  fx.dir.file("o.csv").string()) == 1);
        sttest::write_text(cfg, "not json at all");
        CHECK(run("experiment --config " + cfg.string() + common + " --out " +
                  fx.dir.file("o.csv").string()) == 1);
    }
    SECTION("gold eval needs --gold and respects leakage") {
        const fs::path cfg = fx.dir.file("exp.json");
        sttest::write_text(cfg,
                           R"({"experiment":"growing","sizes":[1.0],"eval":"gold","seed":3})");
        CHECK(run("experiment --config " + cfg.string() + common + " --out " +
                  fx.dir.file("o.csv").string()) == 1);  // missing --gold

        const fs::path gold = fx.dir.file("gold.jsonl");
        sttest::write_text(
            gold,
            R"({"id":"g1","created_at":4500000,"account":"x","text":"sportsw11 sportsw12 sh1","labels":["sports"]})"
            "\n"
            R"({"id":"g2","created_at":4600000,"account":"x","text":"sh1 sh2 sh3","labels":["other"]})"
            "\n");
        CHECK(run("experiment --config " + cfg.string() + common + " --gold " + gold.string() +
                  " --out " + fx.dir.file("g.csv").string()) == 0);

        // gold preceding the whole corpus -> leakage -> exit 2
        const fs::path early = fx.dir.file("early.jsonl");
        sttest::write_text(
            early,
            R"({"id":"g1","created_at":-10,"account":"x","text":"sportsw1","labels":["sports"]})"
            "\n");
        CHECK(run("experiment --config " + cfg.string() + common + " --gold " + early.string() +
                  " --out " + fx.dir.file("e.csv").string()) == 2);
    }
}

TEST_CASE("cli report prints best and worst windows") {
    Fixture fx(6, 1000, 1.2);
    const fs::path cfg = fx.dir.file("exp.json");
    sttest::write_text(cfg, R"({"experiment":"growing","topics":["sports","politics"],)"
                            R"("sizes":[0.3,0.6,1.0],"eval":"noisy","seed":1})");
    const fs::path csv = fx.dir.file("out.csv");
    REQUIRE(run("experiment --config " + cfg.string() + " --tweets " + fx.tweets.string() +
                " --accounts " + fx.accounts.string() +
                " --topics politics,sports,technology --out " + csv.string()) == 0);

    const fs::path stdout_file = fx.dir.file("report.txt");
    REQUIRE(run_capture("report --in " + csv.string(), stdout_file) == 0);
    const std::string text = sttest::read_text(stdout_file);
    CHECK(text.find("sports best:") != std::string::npos);
    CHECK(text.find("sports worst:") != std::string::npos);
    CHECK(text.find("politics best:") != std::string::npos);

    // header-only CSV has no data rows
    const fs::path empty_csv = fx.dir.file("empty.csv");
    sttest::write_text(empty_csv,
                       "experiment,topic,window_start_frac,window_size_frac,p,"
                       "precision,recall,f1,tp,fp,fn\n");
    CHECK(run("report --in " + empty_csv.string()) == 2);
    CHECK(run("report --in /nonexistent.csv") == 2);
}

TEST_CASE("cli ends every run with one status line on stderr") {
    Fixture fx;
    const fs::path err = fx.dir.file("stderr.txt");
    auto last_stderr_line = [&](const std::string& args) {
        const std::string cmd =
            kCli + " " + args + " >/dev/null 2>" + err.string();
        const int status = std::system(cmd.c_str());
        CHECK(WIFEXITED(status));
        std::istringstream lines(sttest::read_text(err));
        std::string line, last;
        while (std::getline(lines, line))
            if (!line.empty()) last = line;
        return last;
    };
    CHECK(last_stderr_line("validate --tweets " + fx.tweets.string() + " --accounts " +
                           fx.accounts.string() +
                           " --topics politics,sports,technology") == "streamtopic: ok");
    CHECK(last_stderr_line("validate --tweets /nope --accounts /nope")
              .rfind("streamtopic: error:", 0) == 0);
    CHECK(last_stderr_line("bogus-subcommand") == "streamtopic: usage error");
}

TEST_CASE("cli commands do not mutate their inputs") {
    Fixture fx;
    const std::string before_tweets = sttest::read_text(fx.tweets);
    const std::string before_accounts = sttest::read_text(fx.accounts);
    REQUIRE(run("validate --tweets " + fx.tweets.string() + " --accounts " +
                fx.accounts.string() + " --topics politics,sports,technology") == 0);
    const fs::path model = fx.dir.file("m.json");
    REQUIRE(run("train --tweets " + fx.tweets.string() + " --accounts " + fx.accounts.string() +
                " --topics politics,sports,technology --topic sports --model lr --out " +
                model.string()) == 0);
    CHECK(sttest::read_text(fx.tweets) == before_tweets);
    CHECK(sttest::read_text(fx.accounts) == before_accounts);
}

TEST_CASE("cli train nb produces a loadable multi-class bundle") {
    Fixture fx;
    const fs::path model = fx.dir.file("nb.json");
    REQUIRE(run("train --tweets " + fx.tweets.string() + " --accounts " + fx.accounts.string() +
                " --topics politics,sports,technology --topic all --model nb --out " +
                model.string()) == 0);
    const auto parsed = nlohmann::json::parse(sttest::read_text(model));
    CHECK(parsed.at("model") == "nb");
    CHECK(parsed.at("classes").size() == 3);

    const fs::path out = fx.dir.file("nb_tagged.jsonl");
    REQUIRE(run("classify --model " + model.string() + " --tweets " + fx.tweets.string() +
                " --out " + out.string()) == 0);
    std::istringstream lines(sttest::read_text(out));
    std::string line;
    REQUIRE(std::getline(lines, line));
    const auto obj = nlohmann::json::parse(line);
    CHECK(obj.at("topics").size() == 1);  // argmax label
    double total = 0;
    for (const auto& [topic, score] : obj.at("topic_scores").items())
        total += score.get<double>();
    CHECK(total == Catch::Approx(1.0).margin(1e-9));
}
