#include "core/timeseries.hpp"

#include <cmath>
#include <stdexcept>

namespace tempo {

void TimeSeries::validate() const {
    if (values.size() != mask.size())
        throw std::invalid_argument("TimeSeries: values/mask length mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        if (mask[i] && !std::isfinite(values[i]))
            throw std::invalid_argument("TimeSeries: non-finite observed value at index " +
                                        std::to_string(i));
}

} // namespace tempo
