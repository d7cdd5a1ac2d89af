#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tokaudit/errors.hpp"
#include "tokaudit/info_parity.hpp"

#include "testutil.hpp"

#include <cmath>

using namespace tokaudit;
using doctest::Approx;

TEST_CASE("train_ngram counts contexts") {
    SUBCASE("unigram counts") {
        NgramScorer s = train_ngram("aaaa", 0, 1.0);
        // p(a) = (4 + 1) / (4 + 256)
        CHECK(s.probability("", 'a') == Approx(5.0 / 260.0).epsilon(1e-15));
        CHECK(s.probability("", 'b') == Approx(1.0 / 260.0).epsilon(1e-15));
    }
    SUBCASE("bigram contexts hand-counted") {
        NgramScorer s = train_ngram("abab", 1, 0.5);
        // contexts: a -> {b: 2}, b -> {a: 1}
        CHECK(s.probability("a", 'b') == Approx((2 + 0.5) / (2 + 0.5 * 256)).epsilon(1e-15));
        CHECK(s.probability("b", 'a') == Approx((1 + 0.5) / (1 + 0.5 * 256)).epsilon(1e-15));
        CHECK(s.probability("a", 'a') == Approx(0.5 / (2 + 0.5 * 256)).epsilon(1e-15));
    }
    SUBCASE("empty training text falls back to uniform") {
        NgramScorer s = train_ngram("", 0, 1.0);
        CHECK(s.uniform_fallback());
        CHECK(s.probability("", 'z') == Approx(1.0 / 256.0).epsilon(1e-15));
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(train_ngram("x", -1, 1.0), ArgumentError);
        CHECK_THROWS_AS(train_ngram("x", 0, 0.0), ArgumentError);
    }
}

TEST_CASE("score_nll cases") {
    SUBCASE("empty text scores zero") {
        NgramScorer s = train_ngram("abc", 2, 0.5);
        CHECK(score_nll(s, "") == 0.0);
    }
    SUBCASE("single-line arithmetic oracle") {
        NgramScorer s = train_ngram("aaaa", 0, 1.0);
        // -log2(5/260) = log2(52)
        CHECK(score_nll(s, "a") == Approx(5.700439718141092).epsilon(1e-13));
    }
    SUBCASE("uniform model scores 8 bits per byte") {
        NgramScorer s = train_ngram("", 0, 1.0);
        CHECK(score_nll(s, "12345678") == Approx(64.0).epsilon(1e-13));
        NgramScorer s3 = train_ngram("", 3, 0.25);
        CHECK(score_nll(s3, "12345678") == Approx(64.0).epsilon(1e-13));
    }
}

TEST_CASE("context distributions are normalized") {
    std::mt19937_64 rng(81);
    std::string text = testutil::random_utf8(rng, 2000);
    NgramScorer s = train_ngram(text, 2, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        // random contexts, some seen, some unseen
        std::string ctx;
        ctx.push_back(static_cast<char>(rng() % 256));
        ctx.push_back(static_cast<char>(rng() % 256));
        double total = 0.0;
        for (int b = 0; b < 256; ++b) total += s.probability(ctx, static_cast<uint8_t>(b));
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("score_nll additivity at order 0") {
    NgramScorer s = train_ngram("the quick brown fox", 0, 0.5);
    std::string x = "hello", y = " world";
    CHECK(score_nll(s, x + y) == Approx(score_nll(s, x) + score_nll(s, y)).epsilon(1e-12));
}

TEST_CASE("compute_ip") {
    CHECK(compute_ip(100.0, 200.0) == 0.5);
    CHECK(compute_ip(42.0, 42.0) == 1.0);
    CHECK_THROWS_AS(compute_ip(10.0, 0.0), DataError);
}

namespace {

ParallelCorpus two_lang_corpus(std::vector<std::string> ref, std::vector<std::string> lang,
                               const std::string& code = "kan_Knda") {
    ParallelCorpus corpus;
    corpus.ref_code = "eng_Latn";
    corpus.n_lines = ref.size();
    corpus.languages["eng_Latn"] = {std::move(ref)};
    corpus.languages[code] = {std::move(lang)};
    return corpus;
}

} // namespace

TEST_CASE("corpus_ip self-parity is exactly 1.0") {
    std::map<std::string, NgramScorer> scorers;
    scorers.emplace("eng_Latn", train_ngram("some shared training text", 2, 0.5));
    ParallelCorpus corpus;
    corpus.ref_code = "eng_Latn";
    corpus.n_lines = 2;
    corpus.languages["eng_Latn"] = {{"line one", "line two"}};
    IPStat stat = corpus_ip(scorers, corpus, "eng_Latn");
    CHECK(stat.corpus_ip == 1.0);
    CHECK(stat.mean_ip == 1.0);
    CHECK(stat.n_used == 2);
}

TEST_CASE("corpus_ip arithmetic oracle on fixed NLLs") {
    // Uniform scorers make per-line NLL = 8 bits per byte; choose lengths so
    // ref lines cost (4*8, 6*8) and lang lines (8*8, 12*8) bits.
    std::map<std::string, NgramScorer> scorers;
    scorers.emplace("eng_Latn", train_ngram("", 0, 1.0));
    scorers.emplace("kan_Knda", train_ngram("", 0, 1.0));
    ParallelCorpus corpus = two_lang_corpus({"abcd", "abcdef"}, {"abcdefgh", "abcdefghijkl"});
    IPStat stat = corpus_ip(scorers, corpus, "kan_Knda");
    CHECK(stat.corpus_ip == Approx(0.5).epsilon(1e-13));
    CHECK(stat.mean_ip == Approx(0.5).epsilon(1e-13));
}

TEST_CASE("corpus_ip skips zero-target lines and errors when none usable") {
    std::map<std::string, NgramScorer> scorers;
    scorers.emplace("eng_Latn", train_ngram("", 0, 1.0));
    scorers.emplace("kan_Knda", train_ngram("", 0, 1.0));
    ParallelCorpus corpus = two_lang_corpus({"abcd", "ef"}, {"abcd", ""});
    IPStat stat = corpus_ip(scorers, corpus, "kan_Knda");
    CHECK(stat.n_used == 1);
    CHECK(stat.n_skipped == 1);

    ParallelCorpus empty = two_lang_corpus({"abcd"}, {""});
    CHECK_THROWS_AS(corpus_ip(scorers, empty, "kan_Knda"), DataError);
}

TEST_CASE("corpus_ip requires scorers for both sides") {
    std::map<std::string, NgramScorer> scorers;
    scorers.emplace("eng_Latn", train_ngram("x", 0, 1.0));
    ParallelCorpus corpus = two_lang_corpus({"a"}, {"b"});
    CHECK_THROWS_AS(corpus_ip(scorers, corpus, "kan_Knda"), ConfigError);
    std::map<std::string, NgramScorer> scorers2;
    scorers2.emplace("kan_Knda", train_ngram("x", 0, 1.0));
    CHECK_THROWS_AS(corpus_ip(scorers2, corpus, "kan_Knda"), ConfigError);
}

TEST_CASE("scale invariance of record-based IP") {
    std::vector<NLLRecord> records;
    std::mt19937_64 rng(91);
    for (size_t i = 0; i < 50; ++i) {
        records.push_back({"eng_Latn", i, 10.0 + static_cast<double>(rng() % 1000) / 7.0});
        records.push_back({"kan_Knda", i, 20.0 + static_cast<double>(rng() % 1000) / 3.0});
    }
    IPStat base = ip_from_records(records, "eng_Latn", "kan_Knda");
    for (double c : {0.5, 3.0, 1e6}) {
        std::vector<NLLRecord> scaled = records;
        for (NLLRecord& r : scaled) r.nll_bits *= c;
        IPStat s = ip_from_records(scaled, "eng_Latn", "kan_Knda");
        CHECK(std::abs(s.corpus_ip - base.corpus_ip) < 1e-12);
        CHECK(std::abs(s.mean_ip - base.mean_ip) < 1e-12);
    }
}

TEST_CASE("nll interchange parsing") {
    SUBCASE("well-formed file") {
        auto records = parse_external_nll("# base=bits\n"
                                          "eng_Latn\t0\t42.5\n"
                                          "eng_Latn\t1\t7\n"
                                          "kan_Knda\t0\t85.0\n");
        REQUIRE(records.size() == 3);
        CHECK(records[0].code == "eng_Latn");
        CHECK(records[0].line_index == 0);
        CHECK(records[0].nll_bits == 42.5);
    }
    SUBCASE("nats are converted to bits") {
        auto records = parse_external_nll("# base=nats\nx\t0\t1.0\n");
        CHECK(records[0].nll_bits == Approx(1.4426950408889634).epsilon(1e-15));
    }
    SUBCASE("missing header") {
        CHECK_THROWS_AS(parse_external_nll("eng_Latn\t0\t42.5\n"), FormatError);
        CHECK_THROWS_AS(parse_external_nll(""), FormatError);
    }
    SUBCASE("negative NLL is a data error") {
        CHECK_THROWS_AS(parse_external_nll("# base=bits\nx\t0\t-1\n"), DataError);
        CHECK_THROWS_AS(parse_external_nll("# base=bits\nx\t0\tnan\n"), DataError);
        CHECK_THROWS_AS(parse_external_nll("# base=bits\nx\t0\tinf\n"), DataError);
    }
    SUBCASE("malformed rows") {
        CHECK_THROWS_AS(parse_external_nll("# base=bits\nonly two\tfields\n"), FormatError);
        CHECK_THROWS_AS(parse_external_nll("# base=bits\nx\t-3\t1.0\n"), FormatError);
    }
    SUBCASE("serialization round-trips") {
        std::vector<NLLRecord> records = {{"eng_Latn", 0, 42.5}, {"kan_Knda", 7, 1.25}};
        auto back = parse_external_nll(serialize_external_nll(records));
        REQUIRE(back.size() == 2);
        CHECK(back[0].nll_bits == 42.5);
        CHECK(back[1].line_index == 7);
    }
}

TEST_CASE("ip_from_records matches a spreadsheet-style sum") {
    std::vector<NLLRecord> records = {
        {"eng_Latn", 0, 4.0}, {"eng_Latn", 1, 6.0},
        {"kan_Knda", 0, 8.0}, {"kan_Knda", 1, 12.0},
    };
    IPStat stat = ip_from_records(records, "eng_Latn", "kan_Knda");
    CHECK(stat.corpus_ip == Approx((4.0 + 6.0) / (8.0 + 12.0)).epsilon(1e-15));
    CHECK(stat.n_used == 2);

    // bounds check against a declared corpus size
    CHECK_THROWS_AS(ip_from_records(records, "eng_Latn", "kan_Knda", 1), DataError);
    CHECK_NOTHROW(ip_from_records(records, "eng_Latn", "kan_Knda", 2));
}

TEST_CASE("monotone data effect: less training data does not help") {
    // Average held-out NLL over >= 10 random truncations of the training
    // data never beats the full model on same-language text.
    std::mt19937_64 rng(101);
    std::string train;
    for (int i = 0; i < 4000; ++i) {
        const char* words[] = {"the ", "cat ", "sat ", "on ", "mats ", "and ", "naps "};
        train += words[rng() % 7];
    }
    std::string held;
    for (int i = 0; i < 400; ++i) {
        const char* words[] = {"the ", "cat ", "sat ", "on ", "mats ", "and ", "naps "};
        held += words[rng() % 7];
    }
    NgramScorer full = train_ngram(train, 3, 0.5);
    double full_nll = score_nll(full, held);
    double truncated_total = 0.0;
    int trials = 12;
    for (int t = 0; t < trials; ++t) {
        size_t keep = train.size() / 10 + rng() % (train.size() / 2);
        NgramScorer part = train_ngram(train.substr(0, keep), 3, 0.5);
        truncated_total += score_nll(part, held);
    }
    CHECK(truncated_total / trials >= full_nll);
}
