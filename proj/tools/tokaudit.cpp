// tokaudit: tokenizer-fairness audit CLI.
//
// Subcommands compose through the filesystem: tp/ip/coverage/diagnose write
// reports, correlate consumes metric and score vectors, report renders
// previously emitted reports as charts. Exit codes: 0 success, 1
// data/validation failure, 2 usage error.

#include "tokaudit/corpus.hpp"
#include "tokaudit/coverage_diag.hpp"
#include "tokaudit/errors.hpp"
#include "tokaudit/info_parity.hpp"
#include "tokaudit/lang_registry.hpp"
#include "tokaudit/parity.hpp"
#include "tokaudit/report.hpp"
#include "tokaudit/stats.hpp"
#include "tokaudit/tok_engine.hpp"
#include "tokaudit/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace tokaudit;

namespace {

// Flag-shape problems: wrong/missing option values. Distinct from the
// library's ArgumentError, which signals data-level validation failures.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::vector<std::string> tokenizers;
    std::string corpus_dir;
    std::string manifest;
    std::string ref = "eng_Latn";
    std::string langs;
    std::string registry;
    std::string scorer = "ngram";
    std::string nll_file;
    std::string train_dir;
    int order = 3;
    double alpha = 0.5;
    std::vector<std::string> metrics;
    std::string scores;
    std::string expected_sign;
    std::string out;
    std::string format = "csv";
    uint64_t seed = 0;
    uint64_t sample = 0;
    std::string normalize = "none";
    bool collapse_middle = false;
};

std::vector<std::string> split_langs(const std::string& langs) {
    std::vector<std::string> out;
    std::stringstream ss(langs);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Registry resolve_registry(const CommonOpts& opts) {
    if (opts.registry.empty()) return Registry::builtin();
    return load_registry(opts.registry);
}

ReportFormat resolve_format(const CommonOpts& opts) {
    auto fmt = parse_report_format(opts.format);
    if (!fmt) throw UsageError("--format: expected csv, doc or svg");
    return *fmt;
}

uni::NormForm resolve_normalize(const CommonOpts& opts) {
    auto form = uni::parse_norm_form(opts.normalize);
    if (!form) throw UsageError("--normalize: expected none, nfc or nfkc");
    return *form;
}

std::vector<TokenizerModel> load_models(const CommonOpts& opts) {
    if (opts.tokenizers.empty()) {
        throw UsageError("--tokenizer: at least one model file is required");
    }
    uni::NormForm norm = resolve_normalize(opts);
    std::vector<TokenizerModel> models;
    models.reserve(opts.tokenizers.size());
    for (const std::string& path : opts.tokenizers) {
        TokenizerModel model = load_tokenizer(path);
        if (norm != uni::NormForm::None) model.normalize = norm;
        models.push_back(std::move(model));
    }
    return models;
}

ParallelCorpus load_corpus(const CommonOpts& opts, const std::vector<std::string>& codes) {
    if (opts.corpus_dir.empty()) {
        throw UsageError("--corpus-dir: required for this subcommand");
    }
    CorpusManifest manifest;
    if (!opts.manifest.empty()) manifest = load_manifest(opts.manifest);
    ParallelCorpus corpus = load_parallel(opts.corpus_dir, codes, opts.ref, manifest);
    if (opts.sample > 0) {
        corpus = subsample(corpus, static_cast<size_t>(opts.sample), opts.seed);
    }
    return corpus;
}

void emit_or_print(const std::string& content, const std::string& out) {
    if (out.empty()) {
        std::cout << content;
    } else {
        write_file(out, content);
    }
}

Provenance base_provenance(const std::string& command, const CommonOpts& opts) {
    Provenance prov;
    prov.command = command;
    for (const std::string& t : opts.tokenizers) prov.add("tokenizer", t);
    if (!opts.corpus_dir.empty()) prov.add("corpus-dir", opts.corpus_dir);
    if (!opts.manifest.empty()) prov.add("manifest", opts.manifest);
    if (!opts.langs.empty()) prov.add("langs", opts.langs);
    prov.add("ref", opts.ref);
    if (!opts.registry.empty()) prov.add("registry", opts.registry);
    if (opts.sample > 0) {
        prov.add("sample", std::to_string(opts.sample));
        prov.add("seed", std::to_string(opts.seed));
    }
    if (opts.normalize != "none") prov.add("normalize", opts.normalize);
    return prov;
}

// ---- tp ----

int run_tp(const CommonOpts& opts) {
    std::vector<std::string> codes = split_langs(opts.langs);
    if (codes.empty()) {
        throw UsageError("--langs: comma-separated language codes are required");
    }
    // Rows follow registry order (the category ordering used in charts);
    // codes outside the registry keep their given order at the end.
    {
        Registry registry = resolve_registry(opts);
        std::vector<std::string> reg_codes = registry.codes();
        auto rank = [&](const std::string& code) {
            auto it = std::find(reg_codes.begin(), reg_codes.end(), code);
            return it == reg_codes.end() ? reg_codes.size()
                                         : static_cast<size_t>(it - reg_codes.begin());
        };
        std::stable_sort(codes.begin(), codes.end(),
                         [&](const std::string& a, const std::string& b) {
                             return rank(a) < rank(b);
                         });
    }
    std::vector<TokenizerModel> models = load_models(opts);
    ParallelCorpus corpus = load_corpus(opts, codes);

    std::vector<const TokenizerModel*> model_ptrs;
    for (const TokenizerModel& m : models) model_ptrs.push_back(&m);
    TPReport report = tp_table(model_ptrs, corpus, codes);

    Provenance prov = base_provenance("tp", opts);
    switch (resolve_format(opts)) {
    case ReportFormat::Csv: emit_or_print(tp_report_csv(report, prov), opts.out); break;
    case ReportFormat::Doc: emit_or_print(tp_report_doc(report, prov), opts.out); break;
    case ReportFormat::Svg: {
        Registry registry = resolve_registry(opts);
        std::vector<BarSeries> series;
        for (const TokenizerModel& m : models) {
            BarSeries s;
            s.name = m.name;
            for (const TPCell& cell : report.cells) {
                if (cell.model == m.name && cell.stat) {
                    s.values[cell.code] = cell.stat->corpus_ratio;
                }
            }
            series.push_back(std::move(s));
        }
        emit_or_print(
            bar_chart_svg("Tokenization parity vs " + opts.ref, series, registry, prov,
                          tp_report_csv(report, prov)),
            opts.out);
        break;
    }
    }
    return 0;
}

// ---- ip ----

int run_ip(const CommonOpts& opts) {
    Provenance prov = base_provenance("ip", opts);
    std::vector<IPStat> stats;

    if (opts.scorer == "ngram") {
        std::vector<std::string> codes = split_langs(opts.langs);
        if (codes.empty()) {
            throw UsageError("--langs: comma-separated language codes are required");
        }
        if (opts.train_dir.empty()) {
            throw UsageError("--train-dir: required with --scorer ngram");
        }
        ParallelCorpus corpus = load_corpus(opts, codes);

        // Equal byte budget: every scorer trains on the same number of
        // bytes, the size of the smallest training file.
        std::vector<std::string> all = codes;
        if (std::find(all.begin(), all.end(), opts.ref) == all.end()) all.push_back(opts.ref);
        std::map<std::string, std::string> train_texts;
        size_t budget = std::string::npos;
        for (const std::string& code : all) {
            std::filesystem::path path =
                std::filesystem::path(opts.train_dir) / (code + ".txt");
            std::string text = read_file(path);
            budget = std::min(budget, text.size());
            train_texts.emplace(code, std::move(text));
        }
        std::map<std::string, NgramScorer> scorers;
        for (auto& [code, text] : train_texts) {
            scorers.emplace(code, train_ngram(std::string_view(text).substr(0, budget),
                                              opts.order, opts.alpha));
        }
        prov.add("scorer", "ngram");
        prov.add("order", std::to_string(opts.order));
        prov.add("alpha", fmt4(opts.alpha));
        prov.add("train-dir", opts.train_dir);
        prov.add("train-bytes", std::to_string(budget));

        for (const std::string& code : codes) {
            stats.push_back(corpus_ip(scorers, corpus, code));
        }
    } else if (opts.scorer == "external") {
        if (opts.nll_file.empty()) {
            throw UsageError("--nll-file: required with --scorer external");
        }
        std::vector<NLLRecord> records = ingest_external_nll(opts.nll_file);
        prov.add("scorer", "external");
        prov.add("nll-file", opts.nll_file);

        std::vector<std::string> codes = split_langs(opts.langs);
        if (codes.empty()) {
            // default: every language in the file except the reference
            std::set<std::string> seen;
            for (const NLLRecord& r : records) {
                if (r.code != opts.ref) seen.insert(r.code);
            }
            codes.assign(seen.begin(), seen.end());
        }
        if (codes.empty()) throw DataError("NLL file contains no non-reference languages");
        for (const std::string& code : codes) {
            stats.push_back(ip_from_records(records, opts.ref, code));
        }
    } else {
        throw UsageError("--scorer: expected 'ngram' or 'external'");
    }

    switch (resolve_format(opts)) {
    case ReportFormat::Csv: emit_or_print(ip_report_csv(stats, prov), opts.out); break;
    case ReportFormat::Doc: emit_or_print(ip_report_doc(stats, prov), opts.out); break;
    case ReportFormat::Svg: {
        Registry registry = resolve_registry(opts);
        BarSeries s;
        s.name = "corpus_ip";
        for (const IPStat& stat : stats) s.values[stat.code] = stat.corpus_ip;
        emit_or_print(bar_chart_svg("Information parity vs " + opts.ref, {s}, registry, prov,
                                    ip_report_csv(stats, prov)),
                      opts.out);
        break;
    }
    }
    return 0;
}

// ---- coverage ----

int run_coverage(const CommonOpts& opts) {
    std::vector<TokenizerModel> models = load_models(opts);
    if (models.size() != 1) {
        throw UsageError("--tokenizer: coverage audits one model at a time");
    }
    Registry registry = resolve_registry(opts);
    std::vector<std::string> codes = split_langs(opts.langs);
    if (codes.empty()) {
        // default: every registered language with a published character set
        for (const LanguageProfile& p : registry.profiles()) {
            if (!char_set(p).empty()) codes.push_back(p.code);
        }
    }
    std::vector<CoverageResult> results;
    for (const std::string& code : codes) {
        results.push_back(missing_char_proportion(models[0], registry.at(code)));
    }
    Provenance prov = base_provenance("coverage", opts);
    prov.add("model", models[0].name);

    switch (resolve_format(opts)) {
    case ReportFormat::Csv: emit_or_print(coverage_csv(results, prov), opts.out); break;
    case ReportFormat::Doc: emit_or_print(coverage_doc(results, prov), opts.out); break;
    case ReportFormat::Svg: {
        BarSeries s;
        s.name = models[0].name;
        for (const CoverageResult& r : results) s.values[r.code] = r.proportion;
        emit_or_print(bar_chart_svg("Missing character proportion (" + models[0].name + ")",
                                    {s}, registry, prov, coverage_csv(results, prov)),
                      opts.out);
        break;
    }
    }
    return 0;
}

// ---- diagnose ----

int run_diagnose(const CommonOpts& opts) {
    std::vector<TokenizerModel> models = load_models(opts);
    if (models.size() != 1) {
        throw UsageError("--tokenizer: diagnose inspects one model at a time");
    }
    std::ostringstream input;
    input << std::cin.rdbuf();
    std::string text = input.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();

    std::vector<TokenInspection> records = inspect(models[0], text);
    Provenance prov = base_provenance("diagnose", opts);
    prov.add("model", models[0].name);

    if (opts.out.empty()) {
        std::cout << inspection_dump(records);
        return 0;
    }
    switch (resolve_format(opts)) {
    case ReportFormat::Csv: write_file(opts.out, inspection_csv(records, prov)); break;
    case ReportFormat::Doc: write_file(opts.out, inspection_doc(records, prov)); break;
    case ReportFormat::Svg:
        throw UsageError("--format: diagnose supports csv or doc output");
    }
    return 0;
}

// ---- correlate ----

int run_correlate(const CommonOpts& opts) {
    if (opts.metrics.size() != 1) {
        throw UsageError("--metric: exactly one metric vector is required");
    }
    if (opts.scores.empty()) throw UsageError("--scores: a score vector file is required");
    auto expected = parse_expected_sign(opts.expected_sign);
    if (!expected) throw UsageError("--expected-sign: expected 'positive' or 'negative'");

    Registry registry = resolve_registry(opts);
    MetricVector metric = read_metric_vector(opts.metrics[0]);
    ScoreVector scores = read_score_vector(opts.scores);

    CorrelationResult result = correlate(metric, scores, registry, opts.collapse_middle);
    SignReport report = sign_report(result, *expected);

    Provenance prov;
    prov.command = "correlate";
    prov.add("metric", opts.metrics[0]);
    prov.add("scores", opts.scores);
    prov.add("expected-sign", opts.expected_sign);
    if (opts.collapse_middle) prov.add("collapse-middle", "true");
    if (!opts.registry.empty()) prov.add("registry", opts.registry);

    std::string metric_name = metric.name.empty() ? "metric" : metric.name;
    std::string score_name = result.score_name.empty() ? "scores" : result.score_name;

    switch (resolve_format(opts)) {
    case ReportFormat::Csv:
        emit_or_print(correlation_csv(report, metric_name, score_name, prov), opts.out);
        break;
    case ReportFormat::Doc:
        emit_or_print(correlation_doc(report, metric_name, score_name, prov), opts.out);
        break;
    case ReportFormat::Svg: {
        HeatmapData data;
        data.row_labels = {metric_name + " / " + score_name};
        data.cells.emplace_back();
        for (const AnnotatedCell& cell : report.cells) {
            data.col_labels.push_back(cell.label);
            data.cells[0].push_back(cell.r);
        }
        emit_or_print(heatmap_svg("Correlation with downstream scores", data, prov,
                                  correlation_csv(report, metric_name, score_name, prov)),
                      opts.out);
        break;
    }
    }
    return 0;
}

// ---- report ----

bool is_correlation_report(const std::string& path) {
    try {
        read_correlation_rows(path);
        return true;
    } catch (const Error&) {
        return false;
    }
}

int run_report(const CommonOpts& opts) {
    if (opts.metrics.empty()) {
        throw UsageError("--metric: at least one emitted report file is required");
    }
    Registry registry = resolve_registry(opts);
    Provenance prov;
    prov.command = "report";
    for (const std::string& m : opts.metrics) prov.add("input", m);
    if (!opts.registry.empty()) prov.add("registry", opts.registry);

    // Correlation inputs combine into a heatmap, per-language metrics into a
    // grouped bar chart.
    if (is_correlation_report(opts.metrics[0])) {
        static const std::vector<std::string> col_order = {
            "overall",       "latin-high",      "latin-middle", "latin-low",
            "nonlatin-high", "nonlatin-middle", "nonlatin-low"};
        HeatmapData data;
        std::vector<std::map<std::string, std::optional<double>>> per_file;
        std::set<std::string> cols_present;
        for (const std::string& path : opts.metrics) {
            auto rows = read_correlation_rows(path);
            if (rows.empty()) throw DataError(path + ": empty correlation report");
            data.row_labels.push_back(rows[0].metric + " / " + rows[0].score);
            std::map<std::string, std::optional<double>> by_cat;
            for (const CorrelationRow& row : rows) {
                by_cat[row.category] = row.r;
                cols_present.insert(row.category);
            }
            per_file.push_back(std::move(by_cat));
        }
        for (const std::string& col : col_order) {
            if (cols_present.count(col)) data.col_labels.push_back(col);
        }
        for (const std::string& col : cols_present) {
            if (std::find(col_order.begin(), col_order.end(), col) == col_order.end()) {
                data.col_labels.push_back(col);
            }
        }
        std::string combined = provenance_block(prov) + "row,category,r\n";
        for (size_t i = 0; i < per_file.size(); ++i) {
            data.cells.emplace_back();
            for (const std::string& col : data.col_labels) {
                auto it = per_file[i].find(col);
                std::optional<double> v = it == per_file[i].end() ? std::nullopt : it->second;
                data.cells.back().push_back(v);
                combined += data.row_labels[i] + "," + col + "," + (v ? fmt4(*v) : "") + "\n";
            }
        }
        switch (resolve_format(opts)) {
        case ReportFormat::Svg:
            emit_or_print(heatmap_svg("Correlation heatmap", data, prov, combined), opts.out);
            break;
        case ReportFormat::Csv:
        case ReportFormat::Doc: emit_or_print(combined, opts.out); break;
        }
        return 0;
    }

    std::vector<BarSeries> series;
    for (const std::string& path : opts.metrics) {
        MetricVector metric = read_metric_vector(path);
        BarSeries s;
        s.name = std::filesystem::path(path).stem().string() + ":" +
                 (metric.name.empty() ? "value" : metric.name);
        s.values = metric.values;
        series.push_back(std::move(s));
    }
    std::string combined = provenance_block(prov) + "series,code,value\n";
    for (const BarSeries& s : series) {
        for (const auto& [code, v] : s.values) {
            combined += s.name + "," + code + "," + fmt4(v) + "\n";
        }
    }
    switch (resolve_format(opts)) {
    case ReportFormat::Svg:
        emit_or_print(bar_chart_svg("Metric by language", series, registry, prov, combined),
                      opts.out);
        break;
    case ReportFormat::Csv:
    case ReportFormat::Doc: emit_or_print(combined, opts.out); break;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tokenizer-fairness audit toolkit"};
    app.set_version_flag("--version", std::string("tokaudit ") + kVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--tokenizer", opts.tokenizers, "tokenizer model file (repeatable)");
        cmd->add_option("--corpus-dir", opts.corpus_dir, "directory of <code>.txt files");
        cmd->add_option("--manifest", opts.manifest, "JSON manifest overriding corpus paths");
        cmd->add_option("--ref", opts.ref, "reference language code");
        cmd->add_option("--langs", opts.langs, "comma-separated language codes");
        cmd->add_option("--registry", opts.registry, "registry file (default: built-in)");
        cmd->add_option("--scorer", opts.scorer, "ngram|external");
        cmd->add_option("--nll-file", opts.nll_file, "external NLL interchange file");
        cmd->add_option("--train-dir", opts.train_dir, "monolingual training text directory");
        cmd->add_option("--order", opts.order, "n-gram context length in bytes");
        cmd->add_option("--alpha", opts.alpha, "additive smoothing constant");
        cmd->add_option("--metric", opts.metrics, "metric vector / report file (repeatable)");
        cmd->add_option("--scores", opts.scores, "downstream score vector file");
        cmd->add_option("--expected-sign", opts.expected_sign, "positive|negative");
        cmd->add_option("--out", opts.out, "output file (default: stdout)");
        cmd->add_option("--format", opts.format, "csv|doc|svg");
        cmd->add_option("--seed", opts.seed, "subsample seed");
        cmd->add_option("--sample", opts.sample, "subsample size (0 = full corpus)");
        cmd->add_option("--normalize", opts.normalize, "none|nfc|nfkc");
        cmd->add_flag("--collapse-middle", opts.collapse_middle,
                      "fold middle tier into low for grouping");
        return cmd;
    };

    CLI::App* tp = add_common(app.add_subcommand("tp", "tokenization parity over a corpus"));
    CLI::App* ip = add_common(app.add_subcommand("ip", "information parity over a corpus"));
    CLI::App* coverage =
        add_common(app.add_subcommand("coverage", "vocabulary character coverage"));
    CLI::App* diagnose =
        add_common(app.add_subcommand("diagnose", "token-level inspection of stdin text"));
    CLI::App* correlate =
        add_common(app.add_subcommand("correlate", "correlate a metric with task scores"));
    CLI::App* report = add_common(app.add_subcommand("report", "render emitted reports"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto started = std::chrono::steady_clock::now();
    int rc = 1;
    std::string command;
    try {
        if (tp->parsed()) {
            command = "tp";
            rc = run_tp(opts);
        } else if (ip->parsed()) {
            command = "ip";
            rc = run_ip(opts);
        } else if (coverage->parsed()) {
            command = "coverage";
            rc = run_coverage(opts);
        } else if (diagnose->parsed()) {
            command = "diagnose";
            rc = run_diagnose(opts);
        } else if (correlate->parsed()) {
            command = "correlate";
            rc = run_correlate(opts);
        } else if (report->parsed()) {
            command = "report";
            rc = run_report(opts);
        }
    } catch (const UsageError& e) {
        std::cerr << "tokaudit " << command << ": " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "tokaudit " << command << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "tokaudit " << command << ": unexpected error: " << e.what() << "\n";
        return 1;
    }

    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    if (!opts.out.empty()) {
        std::cerr << "tokaudit " << command << ": wrote " << opts.out << " (" << elapsed
                  << " ms)\n";
    }
    return rc;
}
