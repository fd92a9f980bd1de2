#pragma once

#include <cstdint>
#include <vector>

#include "core/frequency.hpp"

namespace tempo {

// Calendar features, one row per time step (history then future), every
// entry normalized to [-0.5, 0.5]. Column set depends on granularity:
//   sub-daily:  second-of-minute, minute-of-hour, hour-of-day,
//               day-of-week, day-of-month, day-of-year
//   daily:      day-of-week, day-of-month, day-of-year
//   weekly:     week-of-year
//   monthly:    month-of-year
//   quarterly/yearly: index position scaled to [-0.5, 0.5]
struct TimeFeatureMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data; // row-major

    double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

size_t time_feature_count(const Frequency& freq);

TimeFeatureMatrix time_features(int64_t start, const Frequency& freq,
                                size_t history_len, size_t horizon);

} // namespace tempo
