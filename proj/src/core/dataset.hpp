#pragma once

#include <string>
#include <vector>

#include "core/timeseries.hpp"

namespace tempo {

enum class DatasetFormat { JsonLines, Binary };

DatasetFormat format_from_name(const std::string& name);

// JSON-Lines: one object per line with keys id, freq, start (ISO-8601),
// values (numbers or null = missing), provenance.
// Binary: magic "TPFN", version u16, record count u64; per record:
// id (u16 length + UTF-8), freq code u8 + multiple u16, start i64
// epoch-seconds, length u32, values as little-endian f32, mask as packed
// bits padded to a whole byte.
void write_dataset(const std::vector<TimeSeries>& series, const std::string& path,
                   DatasetFormat format);
std::vector<TimeSeries> read_dataset(const std::string& path);

} // namespace tempo
