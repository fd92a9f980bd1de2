#include "core/calendar.hpp"

#include <array>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace tempo {

// Days-from-civil and inverse follow the standard public-domain algorithms
// for the proleptic Gregorian calendar.
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

CivilTime civil_from_epoch(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / 86400;
    int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    CivilTime ct;
    civil_from_days(days, ct.year, ct.month, ct.day);
    ct.hour = static_cast<int>(rem / 3600);
    ct.minute = static_cast<int>((rem % 3600) / 60);
    ct.second = static_cast<int>(rem % 60);
    return ct;
}

int64_t epoch_from_civil(const CivilTime& ct) {
    return days_from_civil(ct.year, ct.month, ct.day) * 86400 +
           ct.hour * 3600 + ct.minute * 60 + ct.second;
}

int day_of_week(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / 86400;
    if (epoch_seconds % 86400 < 0) days -= 1;
    // 1970-01-01 was a Thursday (index 3 with Monday = 0)
    int64_t dow = (days + 3) % 7;
    if (dow < 0) dow += 7;
    return static_cast<int>(dow);
}

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths{31, 28, 31, 30, 31, 30,
                                                 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[month - 1];
}

int day_of_year(const CivilTime& ct) {
    static constexpr std::array<int, 12> cum{0,   31,  59,  90,  120, 151,
                                             181, 212, 243, 273, 304, 334};
    int doy = cum[ct.month - 1] + ct.day;
    if (ct.month > 2 && is_leap_year(ct.year)) ++doy;
    return doy;
}

int64_t advance(int64_t epoch_seconds, const Frequency& freq, int64_t steps) {
    const int64_t m = freq.multiple;
    auto checked = [&](int64_t seconds_per_step) {
        const int64_t delta = seconds_per_step * m * steps;
        if (steps != 0 && delta / (seconds_per_step * m) != steps)
            throw std::overflow_error("timestamp overflow while rolling forward");
        const int64_t out = epoch_seconds + delta;
        if ((delta > 0 && out < epoch_seconds) || (delta < 0 && out > epoch_seconds))
            throw std::overflow_error("timestamp overflow while rolling forward");
        return out;
    };
    switch (freq.unit) {
        case FreqUnit::Seconds: return checked(1);
        case FreqUnit::Minutes: return checked(60);
        case FreqUnit::Hours: return checked(3600);
        case FreqUnit::Days: return checked(86400);
        case FreqUnit::Weeks: return checked(7 * 86400);
        case FreqUnit::Months:
        case FreqUnit::Quarters:
        case FreqUnit::Years: {
            int64_t months_per_step = freq.unit == FreqUnit::Months    ? 1
                                      : freq.unit == FreqUnit::Quarters ? 3
                                                                        : 12;
            CivilTime ct = civil_from_epoch(epoch_seconds);
            int64_t total = static_cast<int64_t>(ct.year) * 12 + (ct.month - 1) +
                            months_per_step * m * steps;
            int64_t y = total >= 0 ? total / 12 : (total - 11) / 12;
            if (y > std::numeric_limits<int>::max() || y < std::numeric_limits<int>::min())
                throw std::overflow_error("timestamp overflow while rolling forward");
            ct.year = static_cast<int>(y);
            ct.month = static_cast<int>(total - y * 12) + 1;
            ct.day = std::min(ct.day, days_in_month(ct.year, ct.month));
            return epoch_from_civil(ct);
        }
    }
    throw std::logic_error("bad FreqUnit");
}

std::string format_iso8601(int64_t epoch_seconds) {
    CivilTime ct = civil_from_epoch(epoch_seconds);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", ct.year,
                  ct.month, ct.day, ct.hour, ct.minute, ct.second);
    return buf;
}

int64_t parse_iso8601(const std::string& text) {
    CivilTime ct;
    int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &ct.year, &ct.month,
                        &ct.day, &ct.hour, &ct.minute, &ct.second);
    if (n != 3 && n != 6)
        throw std::invalid_argument("malformed ISO-8601 timestamp '" + text + "'");
    if (ct.month < 1 || ct.month > 12 || ct.day < 1 ||
        ct.day > days_in_month(ct.year, ct.month) || ct.hour < 0 || ct.hour > 23 ||
        ct.minute < 0 || ct.minute > 59 || ct.second < 0 || ct.second > 60)
        throw std::invalid_argument("out-of-range ISO-8601 timestamp '" + text + "'");
    return epoch_from_civil(ct);
}

} // namespace tempo
