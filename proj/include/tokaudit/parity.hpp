#pragma once

#include "tokaudit/corpus.hpp"
#include "tokaudit/tok_engine.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tokaudit {

// Token-count premium of one sentence pair: |t(s_lang)| / |t(s_ref)|.
struct PremiumSample {
    size_t line_index = 0;
    uint64_t len_lang = 0;
    uint64_t len_ref = 0;
    std::optional<double> ratio; // absent when the reference tokenizes empty
};

// Per-language tokenization parity over a corpus. corpus_ratio is the
// headline value: total tokens for the language over total tokens for the
// reference, computed in integer sums with a single final division.
struct TPStat {
    std::string code;
    double corpus_ratio = 0.0;
    double mean_ratio = 0.0;
    double median_ratio = 0.0;
    double stdev_ratio = 0.0; // population
    uint64_t sum_lang = 0;
    uint64_t sum_ref = 0;
    size_t n_used = 0;
    size_t n_skipped = 0;
    std::vector<PremiumSample> samples; // per-sentence distribution
};

struct TPCell {
    std::string model;
    std::string code;
    std::optional<TPStat> stat;
    std::string error; // set when the cell could not be computed
};

struct TPReport {
    std::vector<TPCell> cells; // model order, then requested code order
};

PremiumSample sentence_premium(const TokenizerModel& model, std::string_view s_lang,
                               std::string_view s_ref);

TPStat corpus_tp(const TokenizerModel& model, const ParallelCorpus& corpus,
                 const std::string& code);

TPReport tp_table(const std::vector<const TokenizerModel*>& models, const ParallelCorpus& corpus,
                  const std::vector<std::string>& codes);

} // namespace tokaudit
