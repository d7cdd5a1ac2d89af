#include "tokaudit/info_parity.hpp"

#include "tokaudit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tokaudit {

namespace {

// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace

NgramScorer::NgramScorer(int order, double alpha) : order_(order), alpha_(alpha) {
    if (order < 0) throw ArgumentError("ngram order must be >= 0");
    if (!(alpha > 0.0)) throw ArgumentError("ngram smoothing alpha must be > 0");
}

double NgramScorer::probability(std::string_view context, uint8_t byte) const {
    uint64_t count = 0;
    uint64_t total = 0;
    auto it = table_.find(std::string(context));
    if (it != table_.end()) {
        total = it->second.total;
        auto bit = it->second.counts.find(byte);
        if (bit != it->second.counts.end()) count = bit->second;
    }
    return (static_cast<double>(count) + alpha_) /
           (static_cast<double>(total) + alpha_ * 256.0);
}

NgramScorer train_ngram(std::string_view text, int order, double alpha) {
    NgramScorer scorer(order, alpha);
    if (text.empty()) {
        scorer.uniform_fallback_ = true;
        return scorer;
    }
    size_t k = static_cast<size_t>(order);
    if (text.size() <= k) {
        // No position has a full context; the model is smoothing-only.
        scorer.uniform_fallback_ = k > 0;
    }
    for (size_t i = k; i < text.size(); ++i) {
        std::string ctx(text.substr(i - k, k));
        auto& slot = scorer.table_[ctx];
        ++slot.counts[static_cast<uint8_t>(text[i])];
        ++slot.total;
    }
    return scorer;
}

double score_nll(const NgramScorer& scorer, std::string_view text) {
    if (text.empty()) return 0.0;
    size_t k = static_cast<size_t>(scorer.order());
    CompensatedSum nll;
    for (size_t i = 0; i < text.size(); ++i) {
        size_t ctx_len = std::min(i, k);
        std::string_view ctx = text.substr(i - ctx_len, ctx_len);
        double p = scorer.probability(ctx, static_cast<uint8_t>(text[i]));
        nll.add(-std::log2(p));
    }
    return nll.value();
}

double compute_ip(double nll_ref_bits, double nll_lang_bits) {
    if (!(nll_lang_bits > 0.0)) {
        throw DataError("information parity undefined: target NLL is zero");
    }
    return nll_ref_bits / nll_lang_bits;
}

IPStat corpus_ip(const std::map<std::string, NgramScorer>& scorers, const ParallelCorpus& corpus,
                 const std::string& code) {
    auto ref_it = scorers.find(corpus.ref_code);
    if (ref_it == scorers.end()) {
        throw ConfigError("no scorer configured for reference language '" + corpus.ref_code +
                          "'");
    }
    auto lang_it = scorers.find(code);
    if (lang_it == scorers.end()) {
        throw ConfigError("no scorer configured for language '" + code + "'");
    }
    const SentenceList& ref = corpus.at(corpus.ref_code);
    const SentenceList& lang = corpus.at(code);

    IPStat stat;
    stat.code = code;
    CompensatedSum sum_ref, sum_lang, sum_ratio;
    for (size_t i = 0; i < corpus.n_lines; ++i) {
        double nll_ref = score_nll(ref_it->second, ref.sentences[i]);
        double nll_lang = score_nll(lang_it->second, lang.sentences[i]);
        if (!(nll_lang > 0.0)) {
            ++stat.n_skipped;
            continue;
        }
        sum_ref.add(nll_ref);
        sum_lang.add(nll_lang);
        sum_ratio.add(nll_ref / nll_lang);
        ++stat.n_used;
    }
    if (stat.n_used == 0) {
        throw DataError("corpus_ip(" + code + "): every line was skipped (zero target NLL)");
    }
    stat.sum_ref_bits = sum_ref.value();
    stat.sum_lang_bits = sum_lang.value();
    stat.corpus_ip = stat.sum_ref_bits / stat.sum_lang_bits;
    stat.mean_ip = sum_ratio.value() / static_cast<double>(stat.n_used);
    return stat;
}

namespace {

double parse_nll_value(const std::string& field, const std::string& where) {
    try {
        size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw FormatError(where + ": malformed number '" + field + "'");
    }
}

} // namespace

std::vector<NLLRecord> parse_external_nll(std::string_view text, std::string_view origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    size_t line_no = 0;
    double to_bits = 0.0;

    // The first non-empty line must declare the log base.
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == "# base=bits") {
            to_bits = 1.0;
        } else if (line == "# base=nats") {
            to_bits = 1.0 / std::log(2.0);
        } else {
            throw FormatError(std::string(origin) +
                              ": first line must declare '# base=bits' or '# base=nats'");
        }
        break;
    }
    if (to_bits == 0.0) {
        throw FormatError(std::string(origin) + ": missing base declaration header");
    }

    std::vector<NLLRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::string where = std::string(origin) + ":" + std::to_string(line_no);

        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw FormatError(where + ": expected 'code<TAB>line_index<TAB>nll'");
        }
        NLLRecord rec;
        rec.code = line.substr(0, t1);
        if (rec.code.empty()) throw FormatError(where + ": empty language code");
        std::string idx = line.substr(t1 + 1, t2 - t1 - 1);
        try {
            size_t pos = 0;
            long long v = std::stoll(idx, &pos);
            if (pos != idx.size() || v < 0) throw std::invalid_argument(idx);
            rec.line_index = static_cast<size_t>(v);
        } catch (const std::exception&) {
            throw FormatError(where + ": malformed line index '" + idx + "'");
        }
        double value = parse_nll_value(line.substr(t2 + 1), where);
        if (!std::isfinite(value) || value < 0.0) {
            throw DataError(where + ": NLL must be finite and non-negative, got '" +
                            line.substr(t2 + 1) + "'");
        }
        rec.nll_bits = value * to_bits;
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<NLLRecord> ingest_external_nll(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open NLL file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_external_nll(buf.str(), path.string());
}

std::string serialize_external_nll(const std::vector<NLLRecord>& records) {
    std::string out = "# base=bits\n";
    char buf[64];
    for (const NLLRecord& r : records) {
        std::snprintf(buf, sizeof buf, "\t%zu\t%.17g\n", r.line_index, r.nll_bits);
        out += r.code;
        out += buf;
    }
    return out;
}

IPStat ip_from_records(const std::vector<NLLRecord>& records, const std::string& ref_code,
                       const std::string& code, size_t n_lines) {
    std::map<size_t, double> ref_by_line, lang_by_line;
    for (const NLLRecord& r : records) {
        if (n_lines > 0 && r.line_index >= n_lines) {
            throw DataError("NLL record for '" + r.code + "' line " +
                            std::to_string(r.line_index) + " is outside the corpus (" +
                            std::to_string(n_lines) + " lines)");
        }
        if (r.code == ref_code) ref_by_line[r.line_index] = r.nll_bits;
        if (r.code == code) lang_by_line[r.line_index] = r.nll_bits;
    }
    if (ref_by_line.empty()) {
        throw ConfigError("no NLL records for reference language '" + ref_code + "'");
    }
    if (lang_by_line.empty()) {
        throw ConfigError("no NLL records for language '" + code + "'");
    }

    IPStat stat;
    stat.code = code;
    CompensatedSum sum_ref, sum_lang, sum_ratio;
    for (const auto& [line, nll_lang] : lang_by_line) {
        auto it = ref_by_line.find(line);
        if (it == ref_by_line.end()) continue;
        if (!(nll_lang > 0.0)) {
            ++stat.n_skipped;
            continue;
        }
        sum_ref.add(it->second);
        sum_lang.add(nll_lang);
        sum_ratio.add(it->second / nll_lang);
        ++stat.n_used;
    }
    if (stat.n_used == 0) {
        throw DataError("ip_from_records(" + code + "): no usable line pairs");
    }
    stat.sum_ref_bits = sum_ref.value();
    stat.sum_lang_bits = sum_lang.value();
    stat.corpus_ip = stat.sum_ref_bits / stat.sum_lang_bits;
    stat.mean_ip = sum_ratio.value() / static_cast<double>(stat.n_used);
    return stat;
}

} // namespace tokaudit
