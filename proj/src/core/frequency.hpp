#pragma once

#include <cstdint>
#include <string>

namespace tempo {

enum class FreqUnit : uint8_t {
    Seconds = 0,
    Minutes = 1,
    Hours = 2,
    Days = 3,
    Weeks = 4,
    Months = 5,
    Quarters = 6,
    Years = 7,
};

// Sampling frequency: unit plus positive multiple (15-minute = Minutes x 15).
struct Frequency {
    FreqUnit unit = FreqUnit::Hours;
    uint32_t multiple = 1;

    bool operator==(const Frequency&) const = default;

    // "15T", "H", "D", "W", "M", "Q", "A", "10S"
    std::string to_string() const;
    static Frequency parse(const std::string& text);
};

// Seasonal period used by MASE and the seasonal-naive baseline.
int seasonal_period(const Frequency& freq);

// True for second/minute/hour granularities.
bool is_sub_daily(const Frequency& freq);

} // namespace tempo
