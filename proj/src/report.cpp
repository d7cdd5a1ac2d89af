#include "tokaudit/report.hpp"

#include "tokaudit/errors.hpp"
#include "tokaudit/version.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace tokaudit {

void Provenance::add(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "doc") return ReportFormat::Doc;
    if (name == "svg") return ReportFormat::Svg;
    return std::nullopt;
}

std::string provenance_block(const Provenance& prov) {
    std::string out = "# tokaudit ";
    out += kVersion;
    out += '\n';
    if (!prov.command.empty()) out += "# command: " + prov.command + "\n";
    for (const auto& [k, v] : prov.fields) out += "# " + k + ": " + v + "\n";
    return out;
}

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

namespace {

std::string fmtN(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(fields[i]);
    }
    out += '\n';
    return out;
}

json provenance_json(const Provenance& prov) {
    json p;
    p["version"] = kVersion;
    p["command"] = prov.command;
    json fields = json::object();
    for (const auto& [k, v] : prov.fields) fields[k] = v;
    p["fields"] = std::move(fields);
    return p;
}

std::string hex_bytes(std::string_view bytes) {
    std::string out;
    char buf[4];
    for (size_t i = 0; i < bytes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned char>(bytes[i]));
        if (i) out += ' ';
        out += buf;
    }
    return out;
}

std::string doc_dump(json& doc, const Provenance& prov) {
    doc["tokaudit"] = provenance_json(prov);
    return doc.dump(2) + "\n";
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string xml_unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        auto starts = [&](std::string_view e) { return s.substr(i, e.size()) == e; };
        if (starts("&amp;")) {
            out += '&';
            i += 5;
        } else if (starts("&lt;")) {
            out += '<';
            i += 4;
        } else if (starts("&gt;")) {
            out += '>';
            i += 4;
        } else if (starts("&quot;")) {
            out += '"';
            i += 6;
        } else {
            out += s[i++];
        }
    }
    return out;
}

// Category fill colors, Latin in blues, non-Latin in warm tones.
std::string category_color(std::optional<std::pair<Script, Tier>> cat) {
    if (!cat) return "#999999";
    switch (cat->first) {
    case Script::Latin:
        switch (cat->second) {
        case Tier::High: return "#1f77b4";
        case Tier::Middle: return "#5ba3d0";
        case Tier::Low: return "#9ecae1";
        }
        break;
    case Script::NonLatin:
        switch (cat->second) {
        case Tier::High: return "#d62728";
        case Tier::Middle: return "#fd8d3c";
        case Tier::Low: return "#fdae6b";
        }
        break;
    }
    return "#999999";
}

std::string diverging_color(double v) {
    v = std::clamp(v, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (v >= 0.0) {
        r = static_cast<int>(std::lround(255 + (178 - 255) * v));
        g = static_cast<int>(std::lround(255 + (24 - 255) * v));
        b = static_cast<int>(std::lround(255 + (43 - 255) * v));
    } else {
        double t = -v;
        r = static_cast<int>(std::lround(255 + (33 - 255) * t));
        g = static_cast<int>(std::lround(255 + (102 - 255) * t));
        b = static_cast<int>(std::lround(255 + (172 - 255) * t));
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string svg_header_comment(const Provenance& prov) {
    std::string inner = "tokaudit " + std::string(kVersion);
    if (!prov.command.empty()) inner += " | command: " + prov.command;
    for (const auto& [k, v] : prov.fields) inner += " | " + k + ": " + xml_escape(v);
    // "--" may not appear inside an XML comment
    size_t pos = 0;
    while ((pos = inner.find("--", pos)) != std::string::npos) {
        inner.replace(pos, 2, "- -");
        pos += 3;
    }
    return "<!-- " + inner + " -->\n";
}

} // namespace

// ---------------------------------------------------------------------------
// CSV / doc writers
// ---------------------------------------------------------------------------

std::string tp_report_csv(const TPReport& report, const Provenance& prov) {
    std::string out = provenance_block(prov);
    out += csv_row({"model", "code", "corpus_ratio", "mean_ratio", "median_ratio", "stdev_ratio",
                    "n_used", "n_skipped", "error"});
    for (const TPCell& cell : report.cells) {
        if (cell.stat) {
            const TPStat& s = *cell.stat;
            out += csv_row({cell.model, cell.code, fmt4(s.corpus_ratio), fmt4(s.mean_ratio),
                            fmt4(s.median_ratio), fmt4(s.stdev_ratio), std::to_string(s.n_used),
                            std::to_string(s.n_skipped), ""});
        } else {
            out += csv_row({cell.model, cell.code, "", "", "", "", "", "", cell.error});
        }
    }
    return out;
}

std::string ip_report_csv(const std::vector<IPStat>& stats, const Provenance& prov) {
    std::string out = provenance_block(prov);
    out += csv_row(
        {"code", "corpus_ip", "mean_ip", "sum_ref_bits", "sum_lang_bits", "n_used", "n_skipped"});
    for (const IPStat& s : stats) {
        out += csv_row({s.code, fmt4(s.corpus_ip), fmt4(s.mean_ip), fmt4(s.sum_ref_bits),
                        fmt4(s.sum_lang_bits), std::to_string(s.n_used),
                        std::to_string(s.n_skipped)});
    }
    return out;
}

std::string coverage_csv(const std::vector<CoverageResult>& results, const Provenance& prov) {
    std::string out = provenance_block(prov);
    out += csv_row({"code", "missing", "total", "proportion"});
    for (const CoverageResult& r : results) {
        out += csv_row(
            {r.code, std::to_string(r.missing), std::to_string(r.total), fmt4(r.proportion)});
    }
    return out;
}

std::string inspection_csv(const std::vector<TokenInspection>& records, const Provenance& prov) {
    std::string out = provenance_block(prov);
    out += csv_row({"index", "token", "id", "raw_bytes", "recovered", "fragment_of_char",
                    "mojibake_suspect"});
    for (size_t i = 0; i < records.size(); ++i) {
        const TokenInspection& r = records[i];
        out += csv_row({std::to_string(i), r.token, std::to_string(r.id), hex_bytes(r.raw_bytes),
                        r.recovered.value_or(""), r.fragment_of_char ? "1" : "0",
                        r.mojibake_suspect ? "1" : "0"});
    }
    return out;
}

std::string correlation_csv(const SignReport& report, const std::string& metric_name,
                            const std::string& score_name, const Provenance& prov) {
    std::string out = provenance_block(prov);
    out += csv_row({"metric", "score", "category", "r", "n", "sign", "small_sample"});
    for (const AnnotatedCell& cell : report.cells) {
        out += csv_row({metric_name, score_name, cell.label, cell.r ? fmt4(*cell.r) : "",
                        std::to_string(cell.n), sign_label_name(cell.sign),
                        cell.n < kSmallSampleN ? "1" : "0"});
    }
    return out;
}

std::string metric_vector_csv(const MetricVector& metric, const Provenance& prov) {
    Provenance p = prov;
    p.add("metric", metric.name);
    std::string out = provenance_block(p);
    out += csv_row({"code", "value"});
    for (const auto& [code, value] : metric.values) out += csv_row({code, fmt4(value)});
    return out;
}

std::string tp_report_doc(const TPReport& report, const Provenance& prov) {
    json doc;
    doc["kind"] = "tp_report";
    json rows = json::array();
    for (const TPCell& cell : report.cells) {
        json row;
        row["model"] = cell.model;
        row["code"] = cell.code;
        if (cell.stat) {
            const TPStat& s = *cell.stat;
            row["corpus_ratio"] = fmt4(s.corpus_ratio);
            row["mean_ratio"] = fmt4(s.mean_ratio);
            row["median_ratio"] = fmt4(s.median_ratio);
            row["stdev_ratio"] = fmt4(s.stdev_ratio);
            row["n_used"] = s.n_used;
            row["n_skipped"] = s.n_skipped;
        } else {
            row["error"] = cell.error;
        }
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc_dump(doc, prov);
}

std::string ip_report_doc(const std::vector<IPStat>& stats, const Provenance& prov) {
    json doc;
    doc["kind"] = "ip_report";
    json rows = json::array();
    for (const IPStat& s : stats) {
        json row;
        row["code"] = s.code;
        row["corpus_ip"] = fmt4(s.corpus_ip);
        row["mean_ip"] = fmt4(s.mean_ip);
        row["sum_ref_bits"] = fmt4(s.sum_ref_bits);
        row["sum_lang_bits"] = fmt4(s.sum_lang_bits);
        row["n_used"] = s.n_used;
        row["n_skipped"] = s.n_skipped;
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc_dump(doc, prov);
}

std::string coverage_doc(const std::vector<CoverageResult>& results, const Provenance& prov) {
    json doc;
    doc["kind"] = "coverage";
    json rows = json::array();
    for (const CoverageResult& r : results) {
        json row;
        row["code"] = r.code;
        row["missing"] = r.missing;
        row["total"] = r.total;
        row["proportion"] = fmt4(r.proportion);
        json missing = json::array();
        for (char32_t cp : r.missing_chars) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "U+%04X", static_cast<uint32_t>(cp));
            missing.push_back(buf);
        }
        row["missing_chars"] = std::move(missing);
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc_dump(doc, prov);
}

std::string inspection_doc(const std::vector<TokenInspection>& records, const Provenance& prov) {
    json doc;
    doc["kind"] = "inspection";
    json rows = json::array();
    for (size_t i = 0; i < records.size(); ++i) {
        const TokenInspection& r = records[i];
        json row;
        row["index"] = i;
        row["token"] = r.token;
        row["id"] = r.id;
        row["raw_bytes"] = hex_bytes(r.raw_bytes);
        if (r.recovered) row["recovered"] = *r.recovered;
        row["fragment_of_char"] = r.fragment_of_char;
        row["mojibake_suspect"] = r.mojibake_suspect;
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc_dump(doc, prov);
}

std::string correlation_doc(const SignReport& report, const std::string& metric_name,
                            const std::string& score_name, const Provenance& prov) {
    json doc;
    doc["kind"] = "correlation";
    json rows = json::array();
    for (const AnnotatedCell& cell : report.cells) {
        json row;
        row["metric"] = metric_name;
        row["score"] = score_name;
        row["category"] = cell.label;
        if (cell.r) row["r"] = fmt4(*cell.r);
        row["n"] = cell.n;
        row["sign"] = sign_label_name(cell.sign);
        row["small_sample"] = cell.n < kSmallSampleN;
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc_dump(doc, prov);
}

std::string inspection_dump(const std::vector<TokenInspection>& records) {
    size_t token_w = 5, bytes_w = 9;
    for (const TokenInspection& r : records) {
        token_w = std::max(token_w, r.token.size());
        bytes_w = std::max(bytes_w, hex_bytes(r.raw_bytes).size());
    }
    std::ostringstream out;
    for (size_t i = 0; i < records.size(); ++i) {
        const TokenInspection& r = records[i];
        std::string token = "'" + r.token + "'";
        std::string bytes = hex_bytes(r.raw_bytes);
        out << i << "\t" << token;
        for (size_t p = r.token.size(); p < token_w; ++p) out << ' ';
        out << "\t[" << bytes << "]";
        for (size_t p = bytes.size(); p < bytes_w; ++p) out << ' ';
        if (r.recovered) out << "\t-> '" << *r.recovered << "'";
        if (r.fragment_of_char) out << "\t(char fragment)";
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// SVG charts
// ---------------------------------------------------------------------------

namespace {

std::string embedded_block(const std::string& embedded) {
    return "<desc id=\"tokaudit-data\">" + xml_escape(embedded) + "</desc>\n";
}

} // namespace

std::string bar_chart_svg(const std::string& title, const std::vector<BarSeries>& series,
                          const Registry& registry, const Provenance& prov,
                          const std::string& embedded) {
    if (series.empty()) throw ArgumentError("bar chart: no data series");

    // Collect codes: registry order first, then unknown codes alphabetically.
    std::vector<std::string> codes;
    for (const std::string& code : registry.codes()) {
        for (const BarSeries& s : series) {
            if (s.values.count(code)) {
                codes.push_back(code);
                break;
            }
        }
    }
    std::vector<std::string> unknown;
    for (const BarSeries& s : series) {
        for (const auto& [code, _] : s.values) {
            if (!registry.find(code) && std::find(unknown.begin(), unknown.end(), code) ==
                                            unknown.end()) {
                unknown.push_back(code);
            }
        }
    }
    std::sort(unknown.begin(), unknown.end());
    codes.insert(codes.end(), unknown.begin(), unknown.end());
    if (codes.empty()) throw ArgumentError("bar chart: no plottable codes");

    double vmax = 0.0;
    for (const BarSeries& s : series) {
        for (const auto& [_, v] : s.values) vmax = std::max(vmax, v);
    }
    if (vmax <= 0.0) vmax = 1.0;

    const double bar_w = 10.0;
    const double group_gap = 8.0;
    const double group_w = bar_w * static_cast<double>(series.size()) + group_gap;
    const double ml = 52.0, mt = 34.0, mb = 86.0;
    const double plot_h = 260.0;
    const double plot_w = group_w * static_cast<double>(codes.size());
    const double width = ml + plot_w + 150.0;
    const double height = mt + plot_h + mb;
    const double y0 = mt + plot_h;

    auto ypos = [&](double v) { return y0 - (v / vmax) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmtN(width, 0)
        << "\" height=\"" << fmtN(height, 0) << "\" font-family=\"sans-serif\">\n";
    svg << svg_header_comment(prov);
    svg << embedded_block(embedded);
    svg << "<text x=\"" << fmtN(ml, 1) << "\" y=\"18\" font-size=\"13\">" << xml_escape(title)
        << "</text>\n";

    // Value axis: four gridlines plus the parity line at 1.0 when in range.
    for (int g = 0; g <= 4; ++g) {
        double v = vmax * g / 4.0;
        double y = ypos(v);
        svg << "<line x1=\"" << fmtN(ml, 1) << "\" y1=\"" << fmtN(y, 1) << "\" x2=\""
            << fmtN(ml + plot_w, 1) << "\" y2=\"" << fmtN(y, 1)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmtN(ml - 6, 1) << "\" y=\"" << fmtN(y + 4, 1)
            << "\" font-size=\"10\" text-anchor=\"end\">" << fmtN(v, 2) << "</text>\n";
    }
    if (vmax >= 1.0) {
        svg << "<line x1=\"" << fmtN(ml, 1) << "\" y1=\"" << fmtN(ypos(1.0), 1) << "\" x2=\""
            << fmtN(ml + plot_w, 1) << "\" y2=\"" << fmtN(ypos(1.0), 1)
            << "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
    }

    for (size_t ci = 0; ci < codes.size(); ++ci) {
        const std::string& code = codes[ci];
        const LanguageProfile* profile = registry.find(code);
        std::optional<std::pair<Script, Tier>> cat;
        if (profile) cat = std::make_pair(profile->script, profile->tier);
        std::string color = category_color(cat);
        double gx = ml + group_w * static_cast<double>(ci);
        for (size_t si = 0; si < series.size(); ++si) {
            auto it = series[si].values.find(code);
            if (it == series[si].values.end()) continue;
            double v = std::max(it->second, 0.0);
            double x = gx + bar_w * static_cast<double>(si);
            double y = ypos(v);
            double opacity = 1.0 - 0.18 * static_cast<double>(si % 5);
            svg << "<rect x=\"" << fmtN(x, 1) << "\" y=\"" << fmtN(y, 1) << "\" width=\""
                << fmtN(bar_w - 1.0, 1) << "\" height=\"" << fmtN(y0 - y, 1) << "\" fill=\""
                << color << "\" fill-opacity=\"" << fmtN(opacity, 2) << "\"/>\n";
        }
        svg << "<text x=\"" << fmtN(gx + group_w / 2.0 - group_gap / 2.0, 1) << "\" y=\""
            << fmtN(y0 + 10.0, 1) << "\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-55 "
            << fmtN(gx + group_w / 2.0 - group_gap / 2.0, 1) << " " << fmtN(y0 + 10.0, 1)
            << ")\">" << xml_escape(code) << "</text>\n";
    }

    // Legend: category swatches, then series order.
    double lx = ml + plot_w + 14.0;
    double ly = mt;
    const std::pair<std::string, std::optional<std::pair<Script, Tier>>> legend_entries[] = {
        {"latin-high", {{Script::Latin, Tier::High}}},
        {"latin-middle", {{Script::Latin, Tier::Middle}}},
        {"latin-low", {{Script::Latin, Tier::Low}}},
        {"nonlatin-high", {{Script::NonLatin, Tier::High}}},
        {"nonlatin-middle", {{Script::NonLatin, Tier::Middle}}},
        {"nonlatin-low", {{Script::NonLatin, Tier::Low}}},
        {"unregistered", std::nullopt},
    };
    for (const auto& [label, cat] : legend_entries) {
        svg << "<rect x=\"" << fmtN(lx, 1) << "\" y=\"" << fmtN(ly - 8, 1)
            << "\" width=\"10\" height=\"10\" fill=\"" << category_color(cat) << "\"/>\n";
        svg << "<text x=\"" << fmtN(lx + 14, 1) << "\" y=\"" << fmtN(ly + 1, 1)
            << "\" font-size=\"10\">" << label << "</text>\n";
        ly += 15.0;
    }
    ly += 6.0;
    for (size_t si = 0; si < series.size(); ++si) {
        svg << "<text x=\"" << fmtN(lx, 1) << "\" y=\"" << fmtN(ly + 1, 1)
            << "\" font-size=\"10\">bar " << (si + 1) << ": " << xml_escape(series[si].name)
            << "</text>\n";
        ly += 15.0;
    }

    svg << "</svg>\n";
    return svg.str();
}

std::string heatmap_svg(const std::string& title, const HeatmapData& data,
                        const Provenance& prov, const std::string& embedded) {
    if (data.row_labels.empty() || data.col_labels.empty()) {
        throw ArgumentError("heatmap: empty data");
    }
    const double cell_w = 72.0, cell_h = 26.0;
    const double ml = 170.0, mt = 70.0;
    const double width = ml + cell_w * static_cast<double>(data.col_labels.size()) + 20.0;
    const double height = mt + cell_h * static_cast<double>(data.row_labels.size()) + 20.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmtN(width, 0)
        << "\" height=\"" << fmtN(height, 0) << "\" font-family=\"sans-serif\">\n";
    svg << svg_header_comment(prov);
    svg << embedded_block(embedded);
    svg << "<text x=\"10\" y=\"18\" font-size=\"13\">" << xml_escape(title) << "</text>\n";

    for (size_t c = 0; c < data.col_labels.size(); ++c) {
        double x = ml + cell_w * static_cast<double>(c) + cell_w / 2.0;
        svg << "<text x=\"" << fmtN(x, 1) << "\" y=\"" << fmtN(mt - 8.0, 1)
            << "\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-30 " << fmtN(x, 1)
            << " " << fmtN(mt - 8.0, 1) << ")\">" << xml_escape(data.col_labels[c])
            << "</text>\n";
    }
    for (size_t r = 0; r < data.row_labels.size(); ++r) {
        double y = mt + cell_h * static_cast<double>(r);
        svg << "<text x=\"" << fmtN(ml - 8.0, 1) << "\" y=\"" << fmtN(y + cell_h / 2.0 + 4.0, 1)
            << "\" font-size=\"10\" text-anchor=\"end\">" << xml_escape(data.row_labels[r])
            << "</text>\n";
        for (size_t c = 0; c < data.col_labels.size(); ++c) {
            double x = ml + cell_w * static_cast<double>(c);
            std::optional<double> v;
            if (r < data.cells.size() && c < data.cells[r].size()) v = data.cells[r][c];
            std::string fill = v ? diverging_color(*v) : "#eeeeee";
            svg << "<rect x=\"" << fmtN(x, 1) << "\" y=\"" << fmtN(y, 1) << "\" width=\""
                << fmtN(cell_w - 2.0, 1) << "\" height=\"" << fmtN(cell_h - 2.0, 1)
                << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"/>\n";
            std::string label = v ? fmt4(*v) : "n/a";
            std::string text_color = v && std::abs(*v) > 0.6 ? "#ffffff" : "#333333";
            svg << "<text x=\"" << fmtN(x + cell_w / 2.0 - 1.0, 1) << "\" y=\""
                << fmtN(y + cell_h / 2.0 + 3.5, 1)
                << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"" << text_color << "\">"
                << label << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

// ---------------------------------------------------------------------------
// readers
// ---------------------------------------------------------------------------

Table parse_csv(std::string_view text, std::string_view origin) {
    Table table;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    bool at_line_start = true;

    auto flush_row = [&]() {
        fields.push_back(field);
        field.clear();
        if (!(fields.size() == 1 && fields[0].empty())) {
            if (table.header.empty()) {
                table.header = fields;
            } else {
                if (fields.size() != table.header.size()) {
                    throw FormatError(std::string(origin) + ": row " +
                                      std::to_string(table.rows.size() + 1) + " has " +
                                      std::to_string(fields.size()) + " fields, expected " +
                                      std::to_string(table.header.size()));
                }
                table.rows.push_back(fields);
            }
        }
        fields.clear();
        row_started = false;
        at_line_start = true;
    };

    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
            continue;
        }
        if (at_line_start && c == '#') {
            // whole line is a provenance/metadata comment
            size_t end = text.find('\n', i);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(i, end - i);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            table.comments.emplace_back(line);
            i = end + (end < text.size() ? 1 : 0);
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            row_started = true;
            at_line_start = false;
            ++i;
            break;
        case ',':
            fields.push_back(field);
            field.clear();
            row_started = true;
            at_line_start = false;
            ++i;
            break;
        case '\r': ++i; break;
        case '\n':
            flush_row();
            ++i;
            break;
        default:
            field += c;
            row_started = true;
            at_line_start = false;
            ++i;
        }
    }
    if (in_quotes) throw FormatError(std::string(origin) + ": unterminated quoted field");
    if (row_started || !fields.empty()) flush_row();
    return table;
}

Table load_csv(const std::filesystem::path& path) {
    return parse_csv(read_file(path), path.string());
}

std::string extract_embedded_data(std::string_view svg) {
    static constexpr std::string_view kOpen = "<desc id=\"tokaudit-data\">";
    static constexpr std::string_view kClose = "</desc>";
    size_t start = svg.find(kOpen);
    if (start == std::string_view::npos) {
        throw FormatError("SVG has no embedded tokaudit data block");
    }
    start += kOpen.size();
    size_t end = svg.find(kClose, start);
    if (end == std::string_view::npos) {
        throw FormatError("SVG embedded data block is unterminated");
    }
    return xml_unescape(svg.substr(start, end - start));
}

namespace {

int column_index(const Table& table, std::string_view name) {
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

double parse_double_field(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(where + ": malformed number '" + s + "'");
    }
}

std::string comment_value(const Table& table, std::string_view key) {
    std::string prefix = "# " + std::string(key) + ": ";
    for (const std::string& c : table.comments) {
        if (c.rfind(prefix, 0) == 0) return c.substr(prefix.size());
    }
    return {};
}

// Pulls (code, value) pairs out of any tabular report the toolkit emits.
MetricVector metric_from_table(const Table& table, const std::string& origin) {
    int code_col = column_index(table, "code");
    if (code_col < 0) throw FormatError(origin + ": no 'code' column");

    // column -> canonical metric label
    const std::pair<const char*, const char*> value_columns[] = {
        {"value", "value"},
        {"corpus_ratio", "TP"},
        {"corpus_ip", "IP"},
        {"proportion", "missing_proportion"},
    };
    int value_col = -1;
    std::string value_name;
    for (const auto& [column, label] : value_columns) {
        value_col = column_index(table, column);
        if (value_col >= 0) {
            value_name = label;
            break;
        }
    }
    if (value_col < 0) {
        throw FormatError(origin +
                          ": no usable value column (value/corpus_ratio/corpus_ip/proportion)");
    }

    // A tp report may span several models; a single metric vector must not
    // silently mix them.
    int model_col = column_index(table, "model");
    std::string model_seen;

    MetricVector metric;
    metric.name = comment_value(table, "metric");
    if (metric.name.empty()) metric.name = value_name;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (model_col >= 0) {
            if (model_seen.empty()) {
                model_seen = row[model_col];
            } else if (row[model_col] != model_seen) {
                throw DataError(origin + ": report contains multiple models ('" + model_seen +
                                "', '" + row[model_col] +
                                "'); filter to one before correlating");
            }
        }
        const std::string& value = row[value_col];
        if (value.empty()) continue; // per-cell error rows carry no value
        std::string where = origin + ": row " + std::to_string(i + 1);
        auto [it, inserted] =
            metric.values.emplace(row[code_col], parse_double_field(value, where));
        (void)it;
        if (!inserted) throw FormatError(where + ": duplicate code '" + row[code_col] + "'");
    }
    if (!std::all_of(metric.values.begin(), metric.values.end(),
                     [](const auto& kv) { return std::isfinite(kv.second); })) {
        throw DataError(origin + ": metric values must be finite");
    }
    return metric;
}

MetricVector metric_from_doc(const json& doc, const std::string& origin) {
    if (!doc.contains("rows") || !doc["rows"].is_array()) {
        throw FormatError(origin + ": doc has no 'rows' array");
    }
    std::string kind = doc.value("kind", std::string());
    const char* value_key = kind == "tp_report"  ? "corpus_ratio"
                            : kind == "ip_report" ? "corpus_ip"
                            : kind == "coverage"  ? "proportion"
                                                  : "value";
    MetricVector metric;
    metric.name = kind == "tp_report"  ? "TP"
                  : kind == "ip_report" ? "IP"
                  : kind == "coverage"  ? "missing_proportion"
                                        : "value";
    std::string model_seen;
    for (const json& row : doc["rows"]) {
        if (!row.contains("code")) continue;
        if (row.contains("model")) {
            std::string model = row["model"].get<std::string>();
            if (model_seen.empty()) {
                model_seen = model;
            } else if (model != model_seen) {
                throw DataError(origin + ": doc contains multiple models");
            }
        }
        if (!row.contains(value_key)) continue;
        double v = row[value_key].is_string()
                       ? parse_double_field(row[value_key].get<std::string>(), origin)
                       : row[value_key].get<double>();
        metric.values[row["code"].get<std::string>()] = v;
    }
    if (metric.values.empty()) throw DataError(origin + ": no usable rows in doc");
    return metric;
}

bool looks_like_svg(std::string_view content) {
    size_t i = content.find_first_not_of(" \t\r\n");
    if (i == std::string_view::npos) return false;
    return content.compare(i, 4, "<svg") == 0 || content.compare(i, 5, "<?xml") == 0;
}

bool looks_like_json(std::string_view content) {
    size_t i = content.find_first_not_of(" \t\r\n");
    return i != std::string_view::npos && content[i] == '{';
}

} // namespace

MetricVector read_metric_vector(const std::filesystem::path& path) {
    std::string content = read_file(path);
    std::string origin = path.string();
    if (looks_like_svg(content)) content = extract_embedded_data(content);
    if (looks_like_json(content)) {
        json doc;
        try {
            doc = json::parse(content);
        } catch (const json::parse_error& e) {
            throw FormatError(origin + ": " + e.what());
        }
        return metric_from_doc(doc, origin);
    }
    return metric_from_table(parse_csv(content, origin), origin);
}

ScoreVector read_score_vector(const std::filesystem::path& path) {
    std::string content = read_file(path);
    std::string origin = path.string();
    if (looks_like_svg(content)) content = extract_embedded_data(content);
    Table table = parse_csv(content, origin);
    MetricVector metric = metric_from_table(table, origin);

    ScoreVector scores;
    scores.values = std::move(metric.values);
    scores.task = comment_value(table, "task");
    scores.model_name = comment_value(table, "model");
    scores.is_fraction = comment_value(table, "scale") == "fraction";
    if (scores.is_fraction) {
        for (const auto& [code, v] : scores.values) {
            if (v < 0.0 || v > 1.0) {
                throw DataError(origin + ": score for '" + code +
                                "' outside [0, 1] but scale is 'fraction'");
            }
        }
    }
    return scores;
}

std::vector<CorrelationRow> read_correlation_rows(const std::filesystem::path& path) {
    std::string content = read_file(path);
    std::string origin = path.string();
    if (looks_like_svg(content)) content = extract_embedded_data(content);
    Table table = parse_csv(content, origin);
    int metric_col = column_index(table, "metric");
    int score_col = column_index(table, "score");
    int cat_col = column_index(table, "category");
    int r_col = column_index(table, "r");
    int n_col = column_index(table, "n");
    int sign_col = column_index(table, "sign");
    int small_col = column_index(table, "small_sample");
    if (metric_col < 0 || cat_col < 0 || r_col < 0) {
        throw FormatError(origin + ": not a correlation report (need metric/category/r columns)");
    }
    std::vector<CorrelationRow> rows;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        CorrelationRow out;
        out.metric = row[metric_col];
        if (score_col >= 0) out.score = row[score_col];
        out.category = row[cat_col];
        std::string where = origin + ": row " + std::to_string(i + 1);
        if (!row[r_col].empty()) out.r = parse_double_field(row[r_col], where);
        if (n_col >= 0) {
            out.n = static_cast<size_t>(parse_double_field(row[n_col], where));
        }
        if (sign_col >= 0) out.sign = row[sign_col];
        if (small_col >= 0) out.small_sample = row[small_col] == "1";
        rows.push_back(std::move(out));
    }
    return rows;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace tokaudit
