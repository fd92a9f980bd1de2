#include "core/dataset.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "core/calendar.hpp"

namespace tempo {

namespace {

constexpr char kMagic[4] = {'T', 'P', 'F', 'N'};
constexpr uint16_t kVersion = 1;

template <typename T>
void put_le(std::string& out, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(reinterpret_cast<char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what, size_t record) {
    T v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw std::runtime_error("truncated binary dataset while reading " +
                                 std::string(what) + " of record " + std::to_string(record));
    return v;
}

void write_jsonl(const std::vector<TimeSeries>& series, std::ostream& out) {
    for (const auto& ts : series) {
        nlohmann::json j;
        j["id"] = ts.id;
        j["freq"] = ts.freq.to_string();
        j["start"] = format_iso8601(ts.start);
        nlohmann::json vals = nlohmann::json::array();
        for (size_t i = 0; i < ts.values.size(); ++i) {
            if (ts.mask[i])
                vals.push_back(ts.values[i]);
            else
                vals.push_back(nullptr);
        }
        j["values"] = std::move(vals);
        j["provenance"] = ts.provenance;
        out << j.dump() << '\n';
    }
}

std::vector<TimeSeries> read_jsonl(std::istream& in) {
    std::vector<TimeSeries> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("malformed JSON at line " + std::to_string(lineno) +
                                     ": " + e.what());
        }
        try {
            TimeSeries ts;
            ts.id = j.at("id").get<std::string>();
            ts.freq = Frequency::parse(j.at("freq").get<std::string>());
            ts.start = parse_iso8601(j.at("start").get<std::string>());
            ts.provenance = j.value("provenance", "");
            for (const auto& v : j.at("values")) {
                if (v.is_null()) {
                    ts.values.push_back(0.0);
                    ts.mask.push_back(false);
                } else {
                    ts.values.push_back(v.get<double>());
                    ts.mask.push_back(true);
                }
            }
            ts.validate();
            out.push_back(std::move(ts));
        } catch (const std::exception& e) {
            throw std::runtime_error("malformed record at line " + std::to_string(lineno) +
                                     ": " + e.what());
        }
    }
    return out;
}

void write_binary(const std::vector<TimeSeries>& series, std::ostream& out) {
    std::string buf;
    buf.append(kMagic, 4);
    put_le(buf, kVersion);
    put_le(buf, static_cast<uint64_t>(series.size()));
    for (const auto& ts : series) {
        put_le(buf, static_cast<uint16_t>(ts.id.size()));
        buf.append(ts.id);
        put_le(buf, static_cast<uint8_t>(ts.freq.unit));
        put_le(buf, static_cast<uint16_t>(ts.freq.multiple));
        put_le(buf, ts.start);
        put_le(buf, static_cast<uint32_t>(ts.values.size()));
        for (double v : ts.values) put_le(buf, static_cast<float>(v));
        const size_t nbytes = (ts.mask.size() + 7) / 8;
        for (size_t b = 0; b < nbytes; ++b) {
            uint8_t byte = 0;
            for (size_t bit = 0; bit < 8; ++bit) {
                const size_t idx = b * 8 + bit;
                if (idx < ts.mask.size() && ts.mask[idx]) byte |= uint8_t(1) << bit;
            }
            put_le(buf, byte);
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<TimeSeries> read_binary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad magic bytes in binary dataset");
    const uint16_t version = get_le<uint16_t>(in, "version", 0);
    if (version != kVersion)
        throw std::runtime_error("unsupported binary dataset version " +
                                 std::to_string(version));
    const uint64_t count = get_le<uint64_t>(in, "record count", 0);
    std::vector<TimeSeries> out;
    out.reserve(count);
    for (uint64_t r = 0; r < count; ++r) {
        TimeSeries ts;
        const uint16_t id_len = get_le<uint16_t>(in, "id length", r);
        ts.id.resize(id_len);
        if (id_len && !in.read(ts.id.data(), id_len))
            throw std::runtime_error("truncated binary dataset while reading id of record " +
                                     std::to_string(r));
        const uint8_t unit = get_le<uint8_t>(in, "freq code", r);
        if (unit > static_cast<uint8_t>(FreqUnit::Years))
            throw std::runtime_error("invalid frequency code in record " + std::to_string(r));
        ts.freq.unit = static_cast<FreqUnit>(unit);
        ts.freq.multiple = get_le<uint16_t>(in, "freq multiple", r);
        ts.start = get_le<int64_t>(in, "start", r);
        const uint32_t len = get_le<uint32_t>(in, "length", r);
        ts.values.resize(len);
        for (uint32_t i = 0; i < len; ++i)
            ts.values[i] = static_cast<double>(get_le<float>(in, "values", r));
        ts.mask.resize(len);
        const size_t nbytes = (len + 7) / 8;
        for (size_t b = 0; b < nbytes; ++b) {
            const uint8_t byte = get_le<uint8_t>(in, "mask", r);
            for (size_t bit = 0; bit < 8; ++bit) {
                const size_t idx = b * 8 + bit;
                if (idx < len) ts.mask[idx] = (byte >> bit) & 1;
            }
        }
        out.push_back(std::move(ts));
    }
    return out;
}

} // namespace

DatasetFormat format_from_name(const std::string& name) {
    if (name == "jsonl") return DatasetFormat::JsonLines;
    if (name == "bin") return DatasetFormat::Binary;
    throw std::invalid_argument("unknown dataset format '" + name + "'");
}

void write_dataset(const std::vector<TimeSeries>& series, const std::string& path,
                   DatasetFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    if (format == DatasetFormat::JsonLines)
        write_jsonl(series, out);
    else
        write_binary(series, out);
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

std::vector<TimeSeries> read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    char magic[4];
    in.read(magic, 4);
    const bool binary = in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0;
    in.clear();
    in.seekg(0);
    return binary ? read_binary(in) : read_jsonl(in);
}

} // namespace tempo
