#include "tokaudit/stats.hpp"

#include "tokaudit/errors.hpp"

#include <cmath>

namespace tokaudit {

namespace {

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

double compensated_mean(std::span<const double> v) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
}

std::optional<double> pearson_or_undefined(std::span<const double> x,
                                           std::span<const double> y) {
    if (x.size() < 2) return std::nullopt;
    bool cx = true, cy = true;
    for (size_t i = 1; i < x.size(); ++i) {
        if (x[i] != x[0]) cx = false;
        if (y[i] != y[0]) cy = false;
    }
    if (cx || cy) return std::nullopt;
    return pearson(x, y);
}

} // namespace

const char* sign_label_name(SignLabel label) {
    switch (label) {
    case SignLabel::Expected: return "expected";
    case SignLabel::Opposite: return "opposite";
    case SignLabel::NotAvailable: return "n/a";
    }
    return "n/a";
}

std::optional<ExpectedSign> parse_expected_sign(std::string_view name) {
    if (name == "positive") return ExpectedSign::Positive;
    if (name == "negative") return ExpectedSign::Negative;
    return std::nullopt;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ArgumentError("pearson: length mismatch (" + std::to_string(x.size()) + " vs " +
                            std::to_string(y.size()) + ")");
    }
    if (x.size() < 2) throw ArgumentError("pearson: need at least 2 points");

    double mean_x = compensated_mean(x);
    double mean_y = compensated_mean(y);
    CompensatedSum sxy, sxx, syy;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mean_x;
        double dy = y[i] - mean_y;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    double vxx = sxx.value();
    double vyy = syy.value();
    if (vxx == 0.0 || vyy == 0.0) {
        throw DataError("pearson: correlation undefined for a constant vector");
    }
    return sxy.value() / std::sqrt(vxx * vyy);
}

CorrelationResult correlate(const MetricVector& metric, const ScoreVector& scores,
                            const Registry& registry, bool collapse_middle) {
    std::vector<std::string> codes;
    std::vector<double> xs, ys;
    for (const auto& [code, value] : metric.values) {
        auto it = scores.values.find(code);
        if (it == scores.values.end()) continue;
        codes.push_back(code);
        xs.push_back(value);
        ys.push_back(it->second);
    }
    if (codes.size() < 2) {
        throw DataError("correlate: need at least 2 languages present in both vectors, got " +
                        std::to_string(codes.size()));
    }

    CorrelationResult result;
    result.metric_name = metric.name;
    result.score_name = scores.task.empty()
                            ? scores.model_name
                            : scores.task + (scores.model_name.empty() ? "" : "/") +
                                  scores.model_name;
    result.n_overall = codes.size();
    result.r_overall = pearson_or_undefined(xs, ys);

    std::map<CategoryKey, std::pair<std::vector<double>, std::vector<double>>> buckets;
    for (size_t i = 0; i < codes.size(); ++i) {
        auto [script, tier] = classify(registry, codes[i]);
        CategoryKey key{script, collapse_tier(tier, collapse_middle)};
        buckets[key].first.push_back(xs[i]);
        buckets[key].second.push_back(ys[i]);
    }
    for (const auto& [key, vecs] : buckets) {
        CategoryCell cell;
        cell.n = vecs.first.size();
        cell.r = pearson_or_undefined(vecs.first, vecs.second);
        result.per_category.emplace(key, cell);
    }
    return result;
}

SignReport sign_report(const CorrelationResult& result, ExpectedSign expected) {
    SignReport report;
    report.expected = expected;

    auto annotate = [&](const std::string& label, std::optional<double> r, size_t n) {
        AnnotatedCell cell;
        cell.label = label;
        cell.r = r;
        cell.n = n;
        if (!r) {
            cell.sign = SignLabel::NotAvailable;
        } else {
            bool matches = expected == ExpectedSign::Negative ? *r < 0.0 : *r > 0.0;
            cell.sign = matches ? SignLabel::Expected : SignLabel::Opposite;
        }
        report.cells.push_back(std::move(cell));
    };

    annotate("overall", result.r_overall, result.n_overall);
    for (const auto& [key, cell] : result.per_category) {
        std::string label = std::string(script_name(key.script)) + "-" + tier_name(key.tier);
        annotate(label, cell.r, cell.n);
    }
    return report;
}

} // namespace tokaudit
