#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/timeseries.hpp"

namespace tempo::aug {

enum class CategoryKind {
    Invariances,
    Structure,
    Seasonality,
    SignalProcessing,
    DiscreteEffects,
    MeasurementArtifacts,
};

std::string category_name(CategoryKind kind);

struct AugmentationConfig {
    double normalize_prob = 0.8;
    double early_mixup_prob = 0.5;
    double late_mixup_prob = 0.25;
    std::map<CategoryKind, double> category_weights = {
        {CategoryKind::Invariances, 0.6},
        {CategoryKind::Structure, 0.6},
        {CategoryKind::Seasonality, 0.5},
        {CategoryKind::SignalProcessing, 0.4},
        {CategoryKind::DiscreteEffects, 0.6},
        {CategoryKind::MeasurementArtifacts, 0.3},
    };
    int categories_min = 2;
    int categories_max = 5;
    double conv_filter_prob = 0.3;
    double finishing_noise_frac = 0.01; // of the IQR
    double selection_threshold = 0.05;
    int max_retries = 10;
    double dirichlet_alpha = 1.5;
    double time_varying_mixup_prob = 0.3;

    void validate() const;
};

// Convex combination of 2-10 equal-length sources. Static mode draws one
// Dirichlet weight vector; time-varying mode interpolates smoothly between
// two draws, so the weights stay on the simplex at every step.
TimeSeries ts_mixup(const std::vector<TimeSeries>& sources, Rng& rng,
                    double dirichlet_alpha, bool time_varying);
// Fixed static weights (tests).
TimeSeries ts_mixup_static(const std::vector<TimeSeries>& sources,
                           const std::vector<double>& weights);

// Individual transformations exposed for the involution / contract tests.
TimeSeries reverse_series(const TimeSeries& s);
TimeSeries negate_series(const TimeSeries& s);
TimeSeries censor_at_quantile(const TimeSeries& s, double q, bool upper);
TimeSeries sobol_quantize(const TimeSeries& s, int levels, uint32_t skip);

// Applies one transformation chosen uniformly within the category. The
// applied transformation's name is appended to `applied` when given.
TimeSeries apply_category(const TimeSeries& series, CategoryKind kind, Rng& rng,
                          std::string* applied = nullptr);

// 1-3 sequential random 1D convolutions (kernel length 3..15, N(0,1)
// weights with unit l1 norm, dilation 1..3), edge-replication padding.
TimeSeries random_conv_filter(const TimeSeries& series, Rng& rng);
// Single convolution pass, exposed for tests.
std::vector<double> conv_1d(const std::vector<double>& x,
                            const std::vector<double>& kernel, int dilation);

// Weighted sampling of 2-5 distinct categories, returned in the fixed
// global application order.
std::vector<CategoryKind> sample_categories(Rng& rng, const AugmentationConfig& cfg);

// Blend of decorrelation and normalized RMS difference in [0, 1].
double change_score(const std::vector<double>& source, const std::vector<double>& output);

// Full cascade. The seed recorded in the provenance string replays the
// output bit-exactly through augment_with_seed on the same pool.
TimeSeries augment_pipeline(const std::vector<TimeSeries>& pool, Rng& rng,
                            const AugmentationConfig& cfg = {});
TimeSeries augment_with_seed(const std::vector<TimeSeries>& pool, uint64_t seed,
                             const AugmentationConfig& cfg = {});
// Extracts the replay seed from a provenance string; nullopt for
// unaugmented or foreign provenance.
std::optional<uint64_t> parse_aug_seed(const std::string& provenance);

// Marks history positions missing: i.i.d. point drops at point_rate plus
// geometric-length blocks arriving at block_rate. Positions at or beyond
// history_len are never touched. The achieved missing fraction of the
// history region is written to *achieved when given.
TimeSeries nan_inject(const TimeSeries& series, Rng& rng, double point_rate,
                      double block_rate, double block_mean_len,
                      size_t history_len = SIZE_MAX, double* achieved = nullptr);

} // namespace tempo::aug
