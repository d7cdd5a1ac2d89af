#pragma once

#include "tokaudit/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokaudit {

// One externally computed total negative log-likelihood, in bits.
struct NLLRecord {
    std::string code;
    size_t line_index = 0;
    double nll_bits = 0.0;
};

// Per-language information parity over a corpus: total reference NLL over
// total target NLL, both in bits.
struct IPStat {
    std::string code;
    double corpus_ip = 0.0;
    double mean_ip = 0.0;
    double sum_ref_bits = 0.0;
    double sum_lang_bits = 0.0;
    size_t n_used = 0;
    size_t n_skipped = 0;
};

// Byte-level additive-smoothing n-gram scorer: a deterministic stand-in for
// an LLM compressor. Context length is in bytes; the alphabet is fixed at
// 256 so every input is scorable.
class NgramScorer {
public:
    NgramScorer(int order, double alpha);

    int order() const { return order_; }
    double alpha() const { return alpha_; }
    bool uniform_fallback() const { return uniform_fallback_; }

    // p(byte | context) with additive smoothing; always > 0.
    double probability(std::string_view context, uint8_t byte) const;

    friend NgramScorer train_ngram(std::string_view text, int order, double alpha);
    friend double score_nll(const NgramScorer& scorer, std::string_view text);

private:
    struct ContextCounts {
        std::unordered_map<uint8_t, uint32_t> counts;
        uint64_t total = 0;
    };
    int order_;
    double alpha_;
    bool uniform_fallback_ = false;
    std::unordered_map<std::string, ContextCounts> table_;
};

NgramScorer train_ngram(std::string_view text, int order, double alpha);

// Total negative log2-likelihood of `text` in bits. Empty text scores 0.
// Bytes whose full k-byte context is unavailable (the first k positions)
// are scored against their shorter prefix context, which is unseen by
// construction and therefore near-uniform.
double score_nll(const NgramScorer& scorer, std::string_view text);

// nll_ref / nll_lang; nll_lang must be positive.
double compute_ip(double nll_ref_bits, double nll_lang_bits);

IPStat corpus_ip(const std::map<std::string, NgramScorer>& scorers, const ParallelCorpus& corpus,
                 const std::string& code);

// Tab-separated NLL interchange: "# base=bits" or "# base=nats" header line,
// then "code<TAB>line_index<TAB>value" records. Nats are converted to bits.
std::vector<NLLRecord> ingest_external_nll(const std::filesystem::path& path);
std::vector<NLLRecord> parse_external_nll(std::string_view text,
                                          std::string_view origin = "<nll>");
std::string serialize_external_nll(const std::vector<NLLRecord>& records);

// IP from externally supplied per-line NLLs (the offline-LLM path). When
// n_lines is nonzero, record indices are validated against it.
IPStat ip_from_records(const std::vector<NLLRecord>& records, const std::string& ref_code,
                       const std::string& code, size_t n_lines = 0);

} // namespace tokaudit
