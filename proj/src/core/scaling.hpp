#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace spinsense {

/// Time accounting for one protocol: t_evo is the mean evolution interval,
/// initialization and measurement cost init_ratio and meas_ratio times that.
struct TimeBudget {
    double t_evo = 1.0;
    double init_ratio = 100.0;
    double meas_ratio = 10.0;

    void validate() const;
};

/// T = M_sam * (t_init + n_seq t_evo + n_seq t_meas)
///   = M_sam * (init_ratio + n_seq (1 + meas_ratio)) * t_evo.
/// The standard strategy is the n_seq = 1 case.
double total_time(const TimeBudget& budget, int n_seq, std::uint64_t m_samples);

/// Standard-strategy sample count with the same total time as the
/// sequential run: M_std = M_seq (init + n(1+meas)) / (init + 1 + meas),
/// rounded to the nearest integer.
std::uint64_t matched_samples(const TimeBudget& budget, int n_seq, std::uint64_t m_seq);

/// One standard sample's duration; the rounding slack of the equal-time
/// match.
double standard_sample_duration(const TimeBudget& budget);

struct FitWindow {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms residual in log space
    int points_used = 0;
};

/// Ordinary least squares on (log x, log y), restricted to x in window.
/// Requires positive data and at least 3 points inside the window.
FitResult fit_loglog(std::span<const double> x, std::span<const double> y,
                     FitWindow window = {});

/// One cell of the error table: the averaged relative error of a protocol
/// at (n_seq, true field, sample count).
struct ErrorCell {
    int n_seq = 0;
    double field = 0.0;
    std::uint64_t m_samples = 0;
    double total_time = 0.0;
    double delta_b_bar = 0.0;
    double std_error = 0.0;
    std::uint64_t stream_tag = 0;
};

struct ScalingTimePoint {
    double total_time = 0.0;
    double delta = 0.0;  // field exponent at this T
    double log_c = 0.0;  // log intercept at this T
};

/// Power-law parameters of delta_b_bar = C(T) B^Delta with C(T) = A T^-alpha.
struct ScalingFit {
    int n_seq = 0;
    double delta_mean = 0.0;
    double delta_spread = 0.0;  // max - min of Delta(T) over the window
    double amplitude = 0.0;     // A
    double alpha = 0.0;
    double residual = 0.0;  // rms residual of the C(T) fit
    std::vector<ScalingTimePoint> per_time;
};

/// Full pipeline over one n_seq's cells: per T fit delta_b_bar vs field in
/// log-log, then fit the intercepts C(T) against T.  Only fields inside
/// b_window and times inside t_window participate.
ScalingFit extract_scaling(std::span<const ErrorCell> cells, FitWindow b_window,
                           FitWindow t_window = {});

/// Time exponent at fixed field: fit of delta_b_bar vs T for cells sharing
/// one (n_seq, field); alpha = -slope.  This is the per-field exponent the
/// summary table reports.
FitResult fit_time_exponent(std::span<const ErrorCell> cells, FitWindow t_window = {});

} // namespace spinsense
