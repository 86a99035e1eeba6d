#include "core/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace spinsense {

void TimeBudget::validate() const {
    if (!(t_evo > 0.0) || !(init_ratio > 0.0) || !(meas_ratio > 0.0))
        throw std::invalid_argument("TimeBudget: t_evo and both ratios must be > 0");
}

double total_time(const TimeBudget& budget, int n_seq, std::uint64_t m_samples) {
    budget.validate();
    if (n_seq < 1)
        throw std::invalid_argument("total_time: n_seq must be >= 1");
    return double(m_samples) * (budget.init_ratio + n_seq * (1.0 + budget.meas_ratio)) *
           budget.t_evo;
}

std::uint64_t matched_samples(const TimeBudget& budget, int n_seq, std::uint64_t m_seq) {
    budget.validate();
    if (n_seq < 1)
        throw std::invalid_argument("matched_samples: n_seq must be >= 1");
    const double ratio = (budget.init_ratio + n_seq * (1.0 + budget.meas_ratio)) /
                         (budget.init_ratio + 1.0 + budget.meas_ratio);
    return std::uint64_t(std::llround(double(m_seq) * ratio));
}

double standard_sample_duration(const TimeBudget& budget) {
    return (budget.init_ratio + 1.0 + budget.meas_ratio) * budget.t_evo;
}

FitResult fit_loglog(std::span<const double> x, std::span<const double> y, FitWindow window) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_loglog: x and y lengths differ");
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!window.contains(x[i]))
            continue;
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::domain_error("fit_loglog: data must be positive (x=" +
                                    std::to_string(x[i]) + ", y=" + std::to_string(y[i]) + ")");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const std::size_t n = lx.size();
    if (n < 3)
        throw std::domain_error("fit_loglog: need at least 3 points in the window, have " +
                                std::to_string(n));

    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0))
        throw std::domain_error("fit_loglog: abscissa values are all identical");

    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / double(n));
    fit.points_used = int(n);
    return fit;
}

ScalingFit extract_scaling(std::span<const ErrorCell> cells, FitWindow b_window,
                           FitWindow t_window) {
    if (cells.empty())
        throw std::invalid_argument("extract_scaling: empty error table");
    const int n_seq = cells.front().n_seq;
    for (const ErrorCell& c : cells)
        if (c.n_seq != n_seq)
            throw std::invalid_argument("extract_scaling: cells must share one n_seq");

    std::map<double, std::vector<const ErrorCell*>> by_time;
    for (const ErrorCell& c : cells)
        if (t_window.contains(c.total_time))
            by_time[c.total_time].push_back(&c);
    if (by_time.size() < 3)
        throw std::domain_error("extract_scaling: need at least 3 total-time values in the "
                                "window, have " +
                                std::to_string(by_time.size()));

    ScalingFit out;
    out.n_seq = n_seq;
    std::vector<double> times;
    std::vector<double> intercepts;
    for (const auto& [time, group] : by_time) {
        std::vector<double> fields;
        std::vector<double> errors;
        for (const ErrorCell* c : group) {
            fields.push_back(c->field);
            errors.push_back(c->delta_b_bar);
        }
        FitResult fit;
        try {
            fit = fit_loglog(fields, errors, b_window);
        } catch (const std::domain_error& err) {
            throw std::domain_error("extract_scaling: field fit failed at JT=" +
                                    std::to_string(time) + " for n_seq=" +
                                    std::to_string(n_seq) + ": " + err.what());
        }
        out.per_time.push_back({time, fit.slope, fit.intercept});
        times.push_back(time);
        intercepts.push_back(std::exp(fit.intercept));
    }

    double delta_min = out.per_time.front().delta;
    double delta_max = delta_min;
    double delta_sum = 0.0;
    for (const ScalingTimePoint& p : out.per_time) {
        delta_min = std::min(delta_min, p.delta);
        delta_max = std::max(delta_max, p.delta);
        delta_sum += p.delta;
    }
    out.delta_mean = delta_sum / double(out.per_time.size());
    out.delta_spread = delta_max - delta_min;

    FitResult time_fit;
    try {
        time_fit = fit_loglog(times, intercepts, {});
    } catch (const std::domain_error& err) {
        throw std::domain_error("extract_scaling: C(T) fit failed for n_seq=" +
                                std::to_string(n_seq) + ": " + err.what());
    }
    out.alpha = -time_fit.slope;
    out.amplitude = std::exp(time_fit.intercept);
    out.residual = time_fit.residual;
    return out;
}

FitResult fit_time_exponent(std::span<const ErrorCell> cells, FitWindow t_window) {
    if (cells.empty())
        throw std::invalid_argument("fit_time_exponent: empty cell list");
    const int n_seq = cells.front().n_seq;
    const double field = cells.front().field;
    std::vector<double> times;
    std::vector<double> errors;
    for (const ErrorCell& c : cells) {
        if (c.n_seq != n_seq || c.field != field)
            throw std::invalid_argument(
                "fit_time_exponent: cells must share one (n_seq, field)");
        times.push_back(c.total_time);
        errors.push_back(c.delta_b_bar);
    }
    return fit_loglog(times, errors, t_window);
}

} // namespace spinsense
