#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tokaudit/errors.hpp"
#include "tokaudit/parity.hpp"

#include "testutil.hpp"

using namespace tokaudit;
using testutil::make_byte_bpe;
using testutil::make_wordpiece;

namespace {

ParallelCorpus make_corpus(std::vector<std::string> ref, std::vector<std::string> lang,
                           const std::string& code = "deu_Latn") {
    ParallelCorpus corpus;
    corpus.ref_code = "eng_Latn";
    corpus.n_lines = ref.size();
    corpus.languages["eng_Latn"] = {std::move(ref)};
    corpus.languages[code] = {std::move(lang)};
    return corpus;
}

} // namespace

TEST_CASE("sentence premium") {
    TokenizerModel model = make_byte_bpe({});
    SUBCASE("identical inputs give exactly 1.0") {
        PremiumSample s = sentence_premium(model, "same text", "same text");
        CHECK(s.ratio.has_value());
        CHECK(*s.ratio == 1.0);
    }
    SUBCASE("hand-counted ratio 1.5") {
        // byte model: "abcdef" -> 6 tokens, "wxyz" -> 4 tokens
        PremiumSample s = sentence_premium(model, "abcdef", "wxyz");
        CHECK(s.len_lang == 6);
        CHECK(s.len_ref == 4);
        CHECK(*s.ratio == 1.5);
    }
    SUBCASE("empty reference is skip-marked") {
        PremiumSample s = sentence_premium(model, "text", "");
        CHECK_FALSE(s.ratio.has_value());
        CHECK(s.len_ref == 0);
    }
}

TEST_CASE("corpus_tp aggregates hand-computed counts") {
    TokenizerModel model = make_byte_bpe({});
    // per-line byte counts: lang (3, 5), ref (2, 2)
    ParallelCorpus corpus = make_corpus({"ab", "cd"}, {"abc", "vwxyz"});
    TPStat stat = corpus_tp(model, corpus, "deu_Latn");
    CHECK(stat.corpus_ratio == (3.0 + 5.0) / (2.0 + 2.0));
    CHECK(stat.mean_ratio == (1.5 + 2.5) / 2.0);
    CHECK(stat.median_ratio == 2.0);
    CHECK(stat.n_used == 2);
    CHECK(stat.n_skipped == 0);
    CHECK(stat.stdev_ratio == 0.5);
}

TEST_CASE("self-parity is exactly 1.0") {
    TokenizerModel models[3] = {
        make_byte_bpe({{"h", "e"}}),
        make_wordpiece({"some", "words", "here"}),
        make_byte_bpe({}),
    };
    ParallelCorpus corpus = make_corpus({"some words", "here too"}, {"x", "y"});
    for (const TokenizerModel& model : models) {
        TPStat stat = corpus_tp(model, corpus, "eng_Latn");
        CHECK(stat.corpus_ratio == 1.0);
        CHECK(stat.mean_ratio == 1.0);
        CHECK(stat.stdev_ratio == 0.0);
    }
}

TEST_CASE("zero-length reference lines are skipped and counted") {
    TokenizerModel model = make_byte_bpe({});
    ParallelCorpus corpus = make_corpus({"ab", "", "cd"}, {"abcd", "stuff", "ef"});
    TPStat stat = corpus_tp(model, corpus, "deu_Latn");
    CHECK(stat.n_used == 2);
    CHECK(stat.n_skipped == 1);
    CHECK(stat.corpus_ratio == (4.0 + 2.0) / (2.0 + 2.0));
    CHECK(stat.samples.size() == 3);
    CHECK_FALSE(stat.samples[1].ratio.has_value());
}

TEST_CASE("all lines skipped is an error") {
    TokenizerModel model = make_byte_bpe({});
    ParallelCorpus corpus = make_corpus({"", ""}, {"a", "b"});
    CHECK_THROWS_AS(corpus_tp(model, corpus, "deu_Latn"), DataError);
}

TEST_CASE("duplication invariance") {
    TokenizerModel model = make_byte_bpe({{"a", "b"}});
    ParallelCorpus corpus = make_corpus({"ab cd", "efg"}, {"abab", "hi jk"});
    TPStat once = corpus_tp(model, corpus, "deu_Latn");

    ParallelCorpus doubled = corpus;
    doubled.n_lines = 4;
    for (auto& [code, list] : doubled.languages) {
        auto copy = list.sentences;
        list.sentences.insert(list.sentences.end(), copy.begin(), copy.end());
    }
    TPStat twice = corpus_tp(model, doubled, "deu_Latn");
    CHECK(twice.corpus_ratio == once.corpus_ratio);
    CHECK(twice.mean_ratio == once.mean_ratio);
}

TEST_CASE("sentence-permutation invariance") {
    TokenizerModel model = make_byte_bpe({});
    ParallelCorpus corpus =
        make_corpus({"one", "tiny", "corpus here"}, {"uno", "pequeno", "corpus aqui"});
    TPStat base = corpus_tp(model, corpus, "deu_Latn");

    ParallelCorpus shuffled = corpus;
    for (auto& [code, list] : shuffled.languages) {
        std::swap(list.sentences[0], list.sentences[2]);
    }
    TPStat perm = corpus_tp(model, shuffled, "deu_Latn");
    CHECK(perm.corpus_ratio == base.corpus_ratio);
    CHECK(perm.mean_ratio == base.mean_ratio);
    CHECK(perm.median_ratio == base.median_ratio);
}

TEST_CASE("corpus_ratio equals exact integer sums") {
    std::mt19937_64 rng(71);
    TokenizerModel model = testutil::random_byte_bpe(rng, 60, "m");
    std::vector<std::string> ref, lang;
    for (int i = 0; i < 40; ++i) {
        ref.push_back(testutil::random_utf8(rng, 24));
        lang.push_back(testutil::random_utf8(rng, 24));
    }
    ParallelCorpus corpus = make_corpus(ref, lang);
    TPStat stat = corpus_tp(model, corpus, "deu_Latn");
    uint64_t num = 0, den = 0;
    for (size_t i = 0; i < corpus.n_lines; ++i) {
        uint64_t r = tokenize(model, ref[i]).count;
        uint64_t l = tokenize(model, lang[i]).count;
        if (r == 0) continue;
        num += l;
        den += r;
    }
    CHECK(stat.corpus_ratio == static_cast<double>(num) / static_cast<double>(den));
}

TEST_CASE("tp_table covers the full matrix and isolates per-cell errors") {
    TokenizerModel m1 = make_byte_bpe({});
    TokenizerModel m2 = make_byte_bpe({{"a", "b"}});
    m1.name = "m1";
    m2.name = "m2";

    ParallelCorpus corpus;
    corpus.ref_code = "eng_Latn";
    corpus.n_lines = 2;
    corpus.languages["eng_Latn"] = {{"ab", "cd"}};
    corpus.languages["deu_Latn"] = {{"abcd", "ef"}};
    corpus.languages["emp_Lang"] = {{"", ""}}; // empty target lines are legal

    TPReport report =
        tp_table({&m1, &m2}, corpus, {"eng_Latn", "deu_Latn", "emp_Lang"});
    REQUIRE(report.cells.size() == 6);
    CHECK(report.cells[0].model == "m1");
    CHECK(report.cells[0].code == "eng_Latn");
    CHECK(report.cells[0].stat->corpus_ratio == 1.0);
    CHECK(report.cells[2].stat->corpus_ratio == 0.0); // empty target, nonzero ref
    CHECK(report.cells[5].model == "m2");

    // cells agree with direct corpus_tp calls
    for (const TPCell& cell : report.cells) {
        const TokenizerModel& m = cell.model == "m1" ? m1 : m2;
        TPStat direct = corpus_tp(m, corpus, cell.code);
        CHECK(cell.stat->corpus_ratio == direct.corpus_ratio);
        CHECK(cell.stat->mean_ratio == direct.mean_ratio);
    }

    // unknown code is still an in-report error, not an abort
    TPReport rep2 = tp_table({&m1}, corpus, {"zzz_Zzzz"});
    CHECK_FALSE(rep2.cells[0].stat.has_value());
    CHECK(rep2.cells[0].error.find("zzz_Zzzz") != std::string::npos);
}
