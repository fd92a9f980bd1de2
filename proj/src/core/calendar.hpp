#pragma once

#include <cstdint>
#include <string>

#include "core/frequency.hpp"

namespace tempo {

// Proleptic Gregorian calendar on epoch seconds, no time zones.
struct CivilTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

int64_t days_from_civil(int y, int m, int d);
void civil_from_days(int64_t z, int& y, int& m, int& d);

CivilTime civil_from_epoch(int64_t epoch_seconds);
int64_t epoch_from_civil(const CivilTime& ct);

// 0 = Monday .. 6 = Sunday
int day_of_week(int64_t epoch_seconds);
// 1-based day of year
int day_of_year(const CivilTime& ct);
bool is_leap_year(int year);
int days_in_month(int year, int month);

// Advance a timestamp by `steps` frequency intervals. Month/quarter/year
// arithmetic clamps the day-of-month. Throws on arithmetic overflow.
int64_t advance(int64_t epoch_seconds, const Frequency& freq, int64_t steps);

// ISO-8601 "YYYY-MM-DDTHH:MM:SS" (date-only accepted on parse).
std::string format_iso8601(int64_t epoch_seconds);
int64_t parse_iso8601(const std::string& text);

} // namespace tempo
