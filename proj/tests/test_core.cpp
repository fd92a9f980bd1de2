#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "core/calendar.hpp"
#include "core/dataset.hpp"
#include "core/frequency.hpp"
#include "core/rng.hpp"
#include "core/scaler.hpp"
#include "core/time_features.hpp"
#include "core/timeseries.hpp"

using namespace tempo;

namespace {

// Independent quantile oracle: brute-force order statistics with linear
// interpolation, written without reference to the Scaler implementation.
double oracle_quantile(std::vector<double> v, double q) {
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = i + 1; j < v.size(); ++j)
            if (v[j] < v[i]) std::swap(v[i], v[j]);
    double pos = q * double(v.size() - 1);
    size_t k = size_t(pos);
    if (k + 1 >= v.size()) return v.back();
    return v[k] + (pos - double(k)) * (v[k + 1] - v[k]);
}

std::string tmp_path(const char* name) {
    return std::string("/tmp/tempo_test_") + name;
}

} // namespace

TEST_CASE("seasonal_period map") {
    CHECK(seasonal_period({FreqUnit::Hours, 1}) == 24);
    CHECK(seasonal_period({FreqUnit::Years, 1}) == 1);
    CHECK(seasonal_period({FreqUnit::Minutes, 15}) == 96);
    CHECK(seasonal_period({FreqUnit::Minutes, 5}) == 288);
    CHECK(seasonal_period({FreqUnit::Seconds, 10}) == 8640);
    CHECK(seasonal_period({FreqUnit::Days, 1}) == 7);
    CHECK(seasonal_period({FreqUnit::Weeks, 1}) == 52);
    CHECK(seasonal_period({FreqUnit::Months, 1}) == 12);
    CHECK(seasonal_period({FreqUnit::Quarters, 1}) == 4);
}

TEST_CASE("frequency string round trip") {
    for (const char* s : {"15T", "H", "D", "W", "M", "Q", "A", "10S", "5T"}) {
        CHECK(Frequency::parse(s).to_string() == s);
    }
    CHECK_THROWS(Frequency::parse(""));
    CHECK_THROWS(Frequency::parse("15X"));
    CHECK_THROWS(Frequency::parse("0T"));
}

TEST_CASE("calendar basics") {
    // 1970-01-01 was a Thursday
    CHECK(day_of_week(0) == 3);
    CHECK(format_iso8601(0) == "1970-01-01T00:00:00");
    CHECK(parse_iso8601("1970-01-01T00:00:00") == 0);
    CHECK(parse_iso8601("1970-01-02") == 86400);
    // month-end clamping: Jan 31 + 1 month -> Feb 28
    int64_t jan31 = parse_iso8601("2001-01-31");
    CHECK(format_iso8601(advance(jan31, {FreqUnit::Months, 1}, 1)) ==
          "2001-02-28T00:00:00");
    // leap year
    CHECK(is_leap_year(2000));
    CHECK(!is_leap_year(1900));
    CHECK(days_in_month(2004, 2) == 29);
}

TEST_CASE("time_features hour at midnight Monday is -0.5") {
    // 2024-01-01 is a Monday
    int64_t start = parse_iso8601("2024-01-01T00:00:00");
    auto m = time_features(start, {FreqUnit::Hours, 1}, 1, 0);
    REQUIRE(m.rows == 1);
    REQUIRE(m.cols == 6);
    CHECK(m.at(0, 2) == doctest::Approx(-0.5)); // hour-of-day
    CHECK(m.at(0, 3) == doctest::Approx(-0.5)); // Monday
}

TEST_CASE("time_features row count and bounds") {
    for (Frequency f : {Frequency{FreqUnit::Minutes, 15}, Frequency{FreqUnit::Days, 1},
                        Frequency{FreqUnit::Weeks, 1}, Frequency{FreqUnit::Months, 1},
                        Frequency{FreqUnit::Quarters, 1}, Frequency{FreqUnit::Years, 1}}) {
        auto m = time_features(parse_iso8601("1999-06-15T12:34:56"), f, 3, 2);
        CHECK(m.rows == 5);
        for (double v : m.data) {
            CHECK(v >= -0.5);
            CHECK(v <= 0.5);
        }
    }
}

TEST_CASE("time_features deterministic") {
    int64_t start = parse_iso8601("2010-03-01T06:00:00");
    auto a = time_features(start, {FreqUnit::Hours, 1}, 16, 8);
    auto b = time_features(start, {FreqUnit::Hours, 1}, 16, 8);
    CHECK(a.data == b.data);
}

TEST_CASE("minmax scaler endpoint mapping") {
    auto s = fit_scaler(ScalerKind::MinMax, std::vector<double>{0.0, 10.0});
    CHECK(s.apply(0.0) == doctest::Approx(0.0));
    CHECK(s.apply(10.0) == doctest::Approx(1.0));
}

TEST_CASE("scaler invert-apply identity for all kinds") {
    Rng rng(42);
    for (auto kind : {ScalerKind::Robust, ScalerKind::MinMax, ScalerKind::Median,
                      ScalerKind::Mean}) {
        std::vector<double> vals;
        for (int i = 0; i < 100; ++i) vals.push_back(rng.normal(3.0, 10.0));
        auto s = fit_scaler(kind, vals);
        for (double x : vals) CHECK(s.invert(s.apply(x)) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("robust scaler golden value") {
    std::vector<double> v{1, 2, 3, 100};
    auto s = fit_scaler(ScalerKind::Robust, v);
    CHECK(s.shift == doctest::Approx(2.5));
    // frozen from the order-statistic oracle: q75 - q25
    double expect = oracle_quantile(v, 0.75) - oracle_quantile(v, 0.25);
    CHECK(expect == doctest::Approx(25.5));
    CHECK(s.scale == doctest::Approx(expect));
}

TEST_CASE("constant series under MinMax uses epsilon scale") {
    auto s = fit_scaler(ScalerKind::MinMax, std::vector<double>{5, 5, 5});
    CHECK(s.scale == doctest::Approx(kScalerEpsilon));
}

TEST_CASE("fit_scaler rejects empty observed set") {
    CHECK_THROWS(fit_scaler(ScalerKind::Robust, std::vector<double>{}));
}

TEST_CASE("scaler skips missing positions") {
    TimeSeries ts;
    ts.values = {1.0, 999.0, 3.0};
    ts.mask = {true, false, true};
    auto s = fit_scaler(ScalerKind::MinMax, ts);
    auto scaled = apply_scaler(s, ts);
    CHECK(scaled.values[1] == 999.0); // untouched
    CHECK(scaled.values[0] == doctest::Approx(0.0));
    CHECK(scaled.values[2] == doctest::Approx(1.0));
}

TEST_CASE("dataset jsonl round trip with missing values") {
    TimeSeries ts;
    ts.values = {1.5, 0.0, -2.25};
    ts.mask = {true, false, true};
    ts.start = parse_iso8601("2020-05-01T00:00:00");
    ts.freq = {FreqUnit::Minutes, 15};
    ts.id = "s0";
    ts.provenance = "test";
    auto path = tmp_path("roundtrip.jsonl");
    write_dataset({ts}, path, DatasetFormat::JsonLines);
    auto back = read_dataset(path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].values[0] == ts.values[0]);
    CHECK(back[0].values[2] == ts.values[2]);
    CHECK(back[0].mask == ts.mask);
    CHECK(back[0].start == ts.start);
    CHECK(back[0].freq == ts.freq);
    CHECK(back[0].id == ts.id);
    CHECK(back[0].provenance == ts.provenance);
    std::remove(path.c_str());
}

TEST_CASE("dataset binary rewrite is byte identical") {
    Rng rng(7);
    std::vector<TimeSeries> all;
    for (int i = 0; i < 50; ++i) {
        TimeSeries ts;
        int n = 1 + int(rng.uniform_int(1, 40));
        for (int j = 0; j < n; ++j) {
            ts.values.push_back(float(rng.normal())); // f32-representable
            ts.mask.push_back(rng.bernoulli(0.9));
        }
        ts.start = int64_t(rng.uniform_int(0, 2'000'000'000));
        ts.freq = {FreqUnit::Hours, 1};
        ts.id = "series_" + std::to_string(i);
        ts.provenance = "gen";
        all.push_back(std::move(ts));
    }
    auto p1 = tmp_path("bin1.bin"), p2 = tmp_path("bin2.bin");
    write_dataset(all, p1, DatasetFormat::Binary);
    auto back = read_dataset(p1);
    write_dataset(back, p2, DatasetFormat::Binary);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string c1((std::istreambuf_iterator<char>(f1)), {});
    std::string c2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(c1 == c2);
    CHECK(!c1.empty());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("truncated binary file reports the record") {
    TimeSeries ts = TimeSeries::with_values({1, 2, 3}, {FreqUnit::Days, 1});
    ts.id = "x";
    auto path = tmp_path("trunc.bin");
    write_dataset({ts, ts}, path, DatasetFormat::Binary);
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), {});
    in.close();
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), std::streamsize(content.size() - 5));
    out.close();
    CHECK_THROWS_WITH_AS(read_dataset(path), doctest::Contains("record 1"),
                         std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("rng determinism and seed derivation") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
}

TEST_CASE("rng normal moments") {
    Rng rng(99);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sobol first points") {
    Sobol1D s;
    CHECK(s.next() == doctest::Approx(0.5));
    CHECK(s.next() == doctest::Approx(0.75));
    CHECK(s.next() == doctest::Approx(0.25));
}
