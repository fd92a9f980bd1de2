#include "core/frequency.hpp"

#include <algorithm>
#include <stdexcept>

namespace tempo {

namespace {

char unit_letter(FreqUnit u) {
    switch (u) {
        case FreqUnit::Seconds: return 'S';
        case FreqUnit::Minutes: return 'T';
        case FreqUnit::Hours: return 'H';
        case FreqUnit::Days: return 'D';
        case FreqUnit::Weeks: return 'W';
        case FreqUnit::Months: return 'M';
        case FreqUnit::Quarters: return 'Q';
        case FreqUnit::Years: return 'A';
    }
    throw std::logic_error("bad FreqUnit");
}

FreqUnit unit_from_letter(char c) {
    switch (c) {
        case 'S': return FreqUnit::Seconds;
        case 'T': return FreqUnit::Minutes;
        case 'H': return FreqUnit::Hours;
        case 'D': return FreqUnit::Days;
        case 'W': return FreqUnit::Weeks;
        case 'M': return FreqUnit::Months;
        case 'Q': return FreqUnit::Quarters;
        case 'A':
        case 'Y': return FreqUnit::Years;
        default: throw std::invalid_argument(std::string("unknown frequency unit '") + c + "'");
    }
}

} // namespace

std::string Frequency::to_string() const {
    std::string s;
    if (multiple != 1) s = std::to_string(multiple);
    s += unit_letter(unit);
    return s;
}

Frequency Frequency::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty frequency string");
    size_t i = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i + 1 != text.size())
        throw std::invalid_argument("malformed frequency string '" + text + "'");
    uint32_t mult = 1;
    if (i > 0) {
        mult = static_cast<uint32_t>(std::stoul(text.substr(0, i)));
        if (mult == 0) throw std::invalid_argument("frequency multiple must be >= 1");
    }
    return Frequency{unit_from_letter(text[i]), mult};
}

int seasonal_period(const Frequency& freq) {
    const int64_t m = freq.multiple;
    int64_t p = 1;
    switch (freq.unit) {
        case FreqUnit::Seconds: p = 86400 / m; break; // one day of samples
        case FreqUnit::Minutes: p = 1440 / m; break;
        case FreqUnit::Hours: p = 24 / m; break;
        case FreqUnit::Days: p = 7; break;
        case FreqUnit::Weeks: p = 52; break;
        case FreqUnit::Months: p = 12; break;
        case FreqUnit::Quarters: p = 4; break;
        case FreqUnit::Years: p = 1; break;
    }
    return static_cast<int>(std::max<int64_t>(1, p));
}

bool is_sub_daily(const Frequency& freq) {
    return freq.unit == FreqUnit::Seconds || freq.unit == FreqUnit::Minutes ||
           freq.unit == FreqUnit::Hours;
}

} // namespace tempo
