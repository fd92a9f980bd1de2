#include "core/time_features.hpp"

#include <algorithm>
#include <stdexcept>

#include "core/calendar.hpp"

namespace tempo {

namespace {

double norm(double value, double cardinality_minus_one) {
    if (cardinality_minus_one <= 0.0) return 0.0;
    return std::clamp(value / cardinality_minus_one - 0.5, -0.5, 0.5);
}

} // namespace

size_t time_feature_count(const Frequency& freq) {
    if (is_sub_daily(freq)) return 6;
    switch (freq.unit) {
        case FreqUnit::Days: return 3;
        case FreqUnit::Weeks: return 1;
        case FreqUnit::Months: return 1;
        case FreqUnit::Quarters:
        case FreqUnit::Years: return 1;
        default: return 1;
    }
}

TimeFeatureMatrix time_features(int64_t start, const Frequency& freq,
                                size_t history_len, size_t horizon) {
    const size_t total = history_len + horizon;
    if (total < 1) throw std::invalid_argument("time_features: empty grid");

    TimeFeatureMatrix m;
    m.rows = total;
    m.cols = time_feature_count(freq);
    m.data.resize(m.rows * m.cols);

    int64_t t = start;
    for (size_t i = 0; i < total; ++i) {
        double* row = m.data.data() + i * m.cols;
        const CivilTime ct = civil_from_epoch(t);
        if (is_sub_daily(freq)) {
            row[0] = norm(ct.second, 59);
            row[1] = norm(ct.minute, 59);
            row[2] = norm(ct.hour, 23);
            row[3] = norm(day_of_week(t), 6);
            row[4] = norm(ct.day - 1, 30);
            row[5] = norm(day_of_year(ct) - 1, 365);
        } else if (freq.unit == FreqUnit::Days) {
            row[0] = norm(day_of_week(t), 6);
            row[1] = norm(ct.day - 1, 30);
            row[2] = norm(day_of_year(ct) - 1, 365);
        } else if (freq.unit == FreqUnit::Weeks) {
            row[0] = norm((day_of_year(ct) - 1) / 7, 52);
        } else if (freq.unit == FreqUnit::Months) {
            row[0] = norm(ct.month - 1, 11);
        } else {
            // quarterly/yearly: index position over the grid
            row[0] = norm(static_cast<double>(i),
                          static_cast<double>(total > 1 ? total - 1 : 1));
        }
        if (i + 1 < total) t = advance(t, freq, 1);
    }
    return m;
}

} // namespace tempo
