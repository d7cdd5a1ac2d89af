#pragma once

#include "tokaudit/lang_registry.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tokaudit {

// Named per-language metric values (TP, IP, missing proportion, ...).
struct MetricVector {
    std::string name;
    std::map<std::string, double> values; // code -> value
};

// Downstream task scores per language; F1/EM values live in [0, 1].
struct ScoreVector {
    std::string task;
    std::string model_name;
    std::map<std::string, double> values;
    bool is_fraction = false; // validated to [0, 1] when set
};

struct CategoryKey {
    Script script;
    Tier tier;

    auto operator<=>(const CategoryKey&) const = default;
};

struct CategoryCell {
    std::optional<double> r; // absent when n < 2 or a vector is constant
    size_t n = 0;
};

// Reports flag categories computed from fewer than this many points.
inline constexpr size_t kSmallSampleN = 8;

struct CorrelationResult {
    std::string metric_name;
    std::string score_name;
    std::optional<double> r_overall;
    size_t n_overall = 0;
    std::map<CategoryKey, CategoryCell> per_category;
};

enum class ExpectedSign { Positive, Negative };
enum class SignLabel { Expected, Opposite, NotAvailable };

const char* sign_label_name(SignLabel label);
std::optional<ExpectedSign> parse_expected_sign(std::string_view name);

struct AnnotatedCell {
    std::string label; // "overall" or "script-tier" category name
    std::optional<double> r;
    size_t n = 0;
    SignLabel sign = SignLabel::NotAvailable;
};

struct SignReport {
    ExpectedSign expected;
    std::vector<AnnotatedCell> cells;
};

// Product-moment correlation with compensated summation. Throws
// ArgumentError on length mismatch or n < 2, DataError on constant input.
double pearson(std::span<const double> x, std::span<const double> y);

// Intersects the two code sets, computes overall and per-(script, tier)
// correlations; categories too small or constant get an explicit undefined
// marker. Codes in the intersection must be registered.
CorrelationResult correlate(const MetricVector& metric, const ScoreVector& scores,
                            const Registry& registry, bool collapse_middle = false);

// Pure labeling of each correlation against the declared expectation.
SignReport sign_report(const CorrelationResult& result, ExpectedSign expected);

} // namespace tokaudit
