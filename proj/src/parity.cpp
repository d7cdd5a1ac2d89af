#include "tokaudit/parity.hpp"

#include "tokaudit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tokaudit {

namespace {

std::vector<uint64_t> count_lines(const TokenizerModel& model, const SentenceList& list) {
    std::vector<uint64_t> counts;
    counts.reserve(list.sentences.size());
    for (const std::string& s : list.sentences) counts.push_back(tokenize(model, s).count);
    return counts;
}

TPStat aggregate(const std::string& code, const std::vector<uint64_t>& lang_counts,
                 const std::vector<uint64_t>& ref_counts) {
    TPStat stat;
    stat.code = code;
    std::vector<double> ratios;
    ratios.reserve(lang_counts.size());
    for (size_t i = 0; i < lang_counts.size(); ++i) {
        PremiumSample sample;
        sample.line_index = i;
        sample.len_lang = lang_counts[i];
        sample.len_ref = ref_counts[i];
        if (ref_counts[i] == 0) {
            ++stat.n_skipped;
        } else {
            sample.ratio = static_cast<double>(lang_counts[i]) / static_cast<double>(ref_counts[i]);
            stat.sum_lang += lang_counts[i];
            stat.sum_ref += ref_counts[i];
            ratios.push_back(*sample.ratio);
            ++stat.n_used;
        }
        stat.samples.push_back(sample);
    }
    if (stat.n_used == 0) {
        throw DataError("corpus_tp(" + code +
                        "): every sentence was skipped (reference tokenizes empty)");
    }
    stat.corpus_ratio = static_cast<double>(stat.sum_lang) / static_cast<double>(stat.sum_ref);

    double sum = 0.0;
    for (double r : ratios) sum += r;
    stat.mean_ratio = sum / static_cast<double>(ratios.size());

    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    size_t n = sorted.size();
    stat.median_ratio = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double ss = 0.0;
    for (double r : ratios) ss += (r - stat.mean_ratio) * (r - stat.mean_ratio);
    stat.stdev_ratio = std::sqrt(ss / static_cast<double>(n));
    return stat;
}

} // namespace

PremiumSample sentence_premium(const TokenizerModel& model, std::string_view s_lang,
                               std::string_view s_ref) {
    PremiumSample sample;
    sample.len_lang = tokenize(model, s_lang).count;
    sample.len_ref = tokenize(model, s_ref).count;
    if (sample.len_ref > 0) {
        sample.ratio =
            static_cast<double>(sample.len_lang) / static_cast<double>(sample.len_ref);
    }
    return sample;
}

TPStat corpus_tp(const TokenizerModel& model, const ParallelCorpus& corpus,
                 const std::string& code) {
    const SentenceList& lang = corpus.at(code);
    const SentenceList& ref = corpus.at(corpus.ref_code);
    return aggregate(code, count_lines(model, lang), count_lines(model, ref));
}

TPReport tp_table(const std::vector<const TokenizerModel*>& models, const ParallelCorpus& corpus,
                  const std::vector<std::string>& codes) {
    TPReport report;
    for (const TokenizerModel* model : models) {
        // Reference counts are shared across every code for this model.
        std::vector<uint64_t> ref_counts = count_lines(*model, corpus.at(corpus.ref_code));
        for (const std::string& code : codes) {
            TPCell cell;
            cell.model = model->name;
            cell.code = code;
            try {
                cell.stat = aggregate(code, count_lines(*model, corpus.at(code)), ref_counts);
            } catch (const Error& e) {
                cell.error = e.what();
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

} // namespace tokaudit
