#pragma once

#include "tokaudit/coverage_diag.hpp"
#include "tokaudit/info_parity.hpp"
#include "tokaudit/lang_registry.hpp"
#include "tokaudit/parity.hpp"
#include "tokaudit/stats.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tokaudit {

// Run provenance recorded in a comment/header block of every emitted file.
// Deliberately excludes timestamps so identical inputs produce byte-identical
// outputs; wall-clock times go to the diagnostic stream only.
struct Provenance {
    std::string command;
    std::vector<std::pair<std::string, std::string>> fields;

    void add(std::string key, std::string value);
};

enum class ReportFormat { Csv, Doc, Svg };
std::optional<ReportFormat> parse_report_format(std::string_view name);

// Fixed 4-decimal float rendering used in all report data sections.
std::string fmt4(double v);

// '#'-prefixed provenance header emitted at the top of CSV reports.
std::string provenance_block(const Provenance& prov);

// ---- writers (return complete file contents) ----

std::string tp_report_csv(const TPReport& report, const Provenance& prov);
std::string ip_report_csv(const std::vector<IPStat>& stats, const Provenance& prov);
std::string coverage_csv(const std::vector<CoverageResult>& results, const Provenance& prov);
std::string inspection_csv(const std::vector<TokenInspection>& records, const Provenance& prov);
std::string correlation_csv(const SignReport& report, const std::string& metric_name,
                            const std::string& score_name, const Provenance& prov);
std::string metric_vector_csv(const MetricVector& metric, const Provenance& prov);

std::string tp_report_doc(const TPReport& report, const Provenance& prov);
std::string ip_report_doc(const std::vector<IPStat>& stats, const Provenance& prov);
std::string coverage_doc(const std::vector<CoverageResult>& results, const Provenance& prov);
std::string inspection_doc(const std::vector<TokenInspection>& records, const Provenance& prov);
std::string correlation_doc(const SignReport& report, const std::string& metric_name,
                            const std::string& score_name, const Provenance& prov);

// Human-readable aligned token dump for the CLI.
std::string inspection_dump(const std::vector<TokenInspection>& records);

// ---- charts ----

struct BarSeries {
    std::string name;
    std::map<std::string, double> values; // code -> value
};

// Grouped bars per language, registry order, colored by (script, tier).
// `embedded` is the CSV content stored inside the chart so emitted SVGs stay
// machine-readable.
std::string bar_chart_svg(const std::string& title, const std::vector<BarSeries>& series,
                          const Registry& registry, const Provenance& prov,
                          const std::string& embedded);

struct HeatmapData {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<std::optional<double>>> cells; // [row][col]
};

// Diverging color scale centered at 0; undefined cells render gray "n/a".
std::string heatmap_svg(const std::string& title, const HeatmapData& data,
                        const Provenance& prov, const std::string& embedded);

// ---- readers ----

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments; // '#' lines, provenance included
};

Table parse_csv(std::string_view text, std::string_view origin = "<csv>");
Table load_csv(const std::filesystem::path& path);

// Reads a metric vector from: a plain "code,value" CSV, a tp/ip/coverage
// report CSV (corpus_ratio / corpus_ip / proportion column), the doc (JSON)
// equivalents, or an SVG with embedded data.
MetricVector read_metric_vector(const std::filesystem::path& path);
ScoreVector read_score_vector(const std::filesystem::path& path);

struct CorrelationRow {
    std::string metric;
    std::string score;
    std::string category; // "overall" or "script-tier"
    std::optional<double> r;
    size_t n = 0;
    std::string sign;
    bool small_sample = false;
};

std::vector<CorrelationRow> read_correlation_rows(const std::filesystem::path& path);

// Extracts the embedded data block from an emitted SVG.
std::string extract_embedded_data(std::string_view svg);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

} // namespace tokaudit
