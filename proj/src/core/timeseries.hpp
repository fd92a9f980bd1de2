#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/frequency.hpp"

namespace tempo {

// Universal payload: values with a missing-value mask (true = observed),
// start timestamp in epoch seconds, sampling frequency, id, and a
// provenance string recording the generator/augmentation lineage.
struct TimeSeries {
    std::vector<double> values;
    std::vector<bool> mask;
    int64_t start = 0;
    Frequency freq;
    std::string id;
    std::string provenance;

    size_t size() const { return values.size(); }

    static TimeSeries with_values(std::vector<double> v, Frequency f = {},
                                  int64_t start = 0, std::string id = "",
                                  std::string provenance = "") {
        TimeSeries ts;
        ts.mask.assign(v.size(), true);
        ts.values = std::move(v);
        ts.freq = f;
        ts.start = start;
        ts.id = std::move(id);
        ts.provenance = std::move(provenance);
        return ts;
    }

    std::vector<double> observed() const {
        std::vector<double> out;
        out.reserve(values.size());
        for (size_t i = 0; i < values.size(); ++i)
            if (mask[i]) out.push_back(values[i]);
        return out;
    }

    size_t observed_count() const {
        size_t n = 0;
        for (bool b : mask) n += b;
        return n;
    }

    // Throws if len(values) != len(mask) or any observed value is non-finite.
    void validate() const;
};

} // namespace tempo
