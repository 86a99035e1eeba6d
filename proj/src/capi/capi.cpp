#include "spinsense/spinsense.h"

#include "core/chain.hpp"
#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/inference.hpp"
#include "core/protocol.hpp"
#include "core/rng.hpp"
#include "core/scaling.hpp"
#include "core/sweep.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace {

thread_local std::string g_last_error;

spinsense_status fail(spinsense_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

/// Runs `body`, mapping exceptions onto status codes.
template <typename Fn>
spinsense_status guarded(Fn&& body) {
    try {
        body();
        g_last_error.clear();
        return SPINSENSE_OK;
    } catch (const spinsense::DegeneratePosteriorError& e) {
        return fail(SPINSENSE_ERR_DEGENERATE_POSTERIOR, e.what());
    } catch (const spinsense::NumericalError& e) {
        return fail(SPINSENSE_ERR_NUMERICAL, e.what());
    } catch (const std::domain_error& e) {
        return fail(SPINSENSE_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SPINSENSE_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::ios_base::failure& e) {
        return fail(SPINSENSE_ERR_IO, e.what());
    } catch (const std::runtime_error& e) {
        return fail(SPINSENSE_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(SPINSENSE_ERR_NUMERICAL, e.what());
    }
}

spinsense::Schedule make_schedule(const double* taus, size_t n_seq) {
    if (taus == nullptr || n_seq == 0)
        throw std::invalid_argument("tau list must be nonempty");
    spinsense::Schedule s;
    s.taus.assign(taus, taus + n_seq);
    s.validate();
    return s;
}

spinsense::Outcome to_outcome(int value) {
    if (value != 0 && value != 1)
        throw std::invalid_argument("outcome must be 0 (down) or 1 (up)");
    return value == 1 ? spinsense::Outcome::Up : spinsense::Outcome::Down;
}

spinsense::FitWindow to_window(double lo, double hi) {
    spinsense::FitWindow w;
    if (hi > 0.0 && std::isfinite(hi)) {
        w.lo = lo;
        w.hi = hi;
    } else if (lo > 0.0) {
        w.lo = lo;
        w.hi = std::numeric_limits<double>::infinity();
    }
    return w;
}

int effective_workers(int requested) {
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

template <typename T>
void require(const T* ptr, const char* name) {
    if (ptr == nullptr)
        throw std::invalid_argument(std::string(name) + " must not be null");
}

} // namespace

struct spinsense_model {
    spinsense::ChainModel impl;
};

struct spinsense_trajectory {
    spinsense_model* owner;
    double field;
    std::shared_ptr<const spinsense::SpectralDecomposition> decomp;
    spinsense::StateVector state;
    double time = 0.0;
    std::mt19937_64 engine;
};

struct spinsense_dataset {
    spinsense::Dataset impl;
};

struct spinsense_posterior {
    spinsense::Posterior impl;
};

struct spinsense_error_table {
    std::vector<spinsense::ErrorCell> cells;
};

extern "C" {

const char* spinsense_last_error(void) { return g_last_error.c_str(); }

const char* spinsense_version(void) { return "0.1.0"; }

spinsense_status spinsense_model_new(int sites, double coupling, spinsense_model** out) {
    return guarded([&] {
        require(out, "out");
        *out = new spinsense_model{spinsense::ChainModel(sites, coupling)};
    });
}

void spinsense_model_free(spinsense_model* model) { delete model; }

int spinsense_model_sites(const spinsense_model* model) {
    return model != nullptr ? model->impl.sites() : 0;
}

double spinsense_model_coupling(const spinsense_model* model) {
    return model != nullptr ? model->impl.coupling() : 0.0;
}

spinsense_status spinsense_trajectory_new(spinsense_model* model, double field,
                                          spinsense_trajectory** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        auto* traj = new spinsense_trajectory{
            model, field, model->impl.decomposition(field),
            spinsense::ferromagnetic_state(model->impl.sites()), 0.0,
            spinsense::rng::stream(0, {})};
        *out = traj;
    });
}

void spinsense_trajectory_free(spinsense_trajectory* traj) { delete traj; }

spinsense_status spinsense_trajectory_reset(spinsense_trajectory* traj) {
    return guarded([&] {
        require(traj, "trajectory");
        traj->state = spinsense::ferromagnetic_state(traj->owner->impl.sites());
        traj->time = 0.0;
    });
}

spinsense_status spinsense_trajectory_seed(spinsense_trajectory* traj, uint64_t seed) {
    return guarded([&] {
        require(traj, "trajectory");
        traj->engine = spinsense::rng::stream(seed, {});
    });
}

spinsense_status spinsense_trajectory_evolve(spinsense_trajectory* traj, double dt) {
    return guarded([&] {
        require(traj, "trajectory");
        traj->state = traj->decomp->evolve(traj->state, dt);
        traj->time += dt;
    });
}

spinsense_status spinsense_trajectory_time(const spinsense_trajectory* traj, double* out) {
    return guarded([&] {
        require(traj, "trajectory");
        require(out, "out");
        *out = traj->time;
    });
}

spinsense_status spinsense_trajectory_magnetization(const spinsense_trajectory* traj, int site,
                                                    double* out) {
    return guarded([&] {
        require(traj, "trajectory");
        require(out, "out");
        *out = spinsense::magnetization(traj->state, site);
    });
}

spinsense_status spinsense_trajectory_outcome_probability(const spinsense_trajectory* traj,
                                                          int outcome, double* out) {
    return guarded([&] {
        require(traj, "trajectory");
        require(out, "out");
        *out = spinsense::outcome_probability(traj->state, to_outcome(outcome));
    });
}

spinsense_status spinsense_trajectory_measure(spinsense_trajectory* traj, int* outcome) {
    return guarded([&] {
        require(traj, "trajectory");
        require(outcome, "outcome");
        const double p_up = spinsense::outcome_probability(traj->state, spinsense::Outcome::Up);
        const spinsense::Outcome got =
            spinsense::sample_outcome(p_up, spinsense::rng::unit_double(traj->engine));
        traj->state = spinsense::collapse(traj->state, got);
        *outcome = got == spinsense::Outcome::Up ? 1 : 0;
    });
}

spinsense_status spinsense_trajectory_apply_outcome(spinsense_trajectory* traj, int outcome) {
    return guarded([&] {
        require(traj, "trajectory");
        traj->state = spinsense::collapse(traj->state, to_outcome(outcome));
    });
}

spinsense_status spinsense_trajectory_initial_fidelity(const spinsense_trajectory* traj,
                                                       double* out) {
    return guarded([&] {
        require(traj, "trajectory");
        require(out, "out");
        const spinsense::StateVector initial =
            spinsense::ferromagnetic_state(traj->owner->impl.sites());
        *out = std::abs(initial.dot(traj->state));
    });
}

spinsense_status spinsense_sequence_probability(spinsense_model* model, double field,
                                                const double* taus, size_t n_seq,
                                                const int* outcomes, double* out) {
    return guarded([&] {
        require(model, "model");
        require(outcomes, "outcomes");
        require(out, "out");
        const spinsense::Schedule schedule = make_schedule(taus, n_seq);
        spinsense::OutcomeSequence seq;
        seq.reserve(n_seq);
        for (size_t i = 0; i < n_seq; ++i)
            seq.push_back(to_outcome(outcomes[i]));
        *out = spinsense::sequence_probability(model->impl, field, schedule, seq);
    });
}

spinsense_status spinsense_dataset_generate(spinsense_model* model, double field,
                                            const double* taus, size_t n_seq,
                                            uint64_t m_samples, uint64_t seed,
                                            spinsense_dataset** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        const spinsense::Schedule schedule = make_schedule(taus, n_seq);
        const spinsense::SequenceDistribution dist(model->impl, field, schedule);
        auto engine = spinsense::rng::stream(seed, {});
        *out = new spinsense_dataset{
            spinsense::generate_dataset(model->impl, dist, schedule, m_samples, engine)};
    });
}

void spinsense_dataset_free(spinsense_dataset* dataset) { delete dataset; }

uint64_t spinsense_dataset_samples(const spinsense_dataset* dataset) {
    return dataset != nullptr ? dataset->impl.samples : 0;
}

int spinsense_dataset_n_seq(const spinsense_dataset* dataset) {
    return dataset != nullptr ? dataset->impl.n_seq() : 0;
}

int spinsense_dataset_sites(const spinsense_dataset* dataset) {
    return dataset != nullptr ? dataset->impl.sites : 0;
}

double spinsense_dataset_coupling(const spinsense_dataset* dataset) {
    return dataset != nullptr ? dataset->impl.coupling : 0.0;
}

spinsense_status spinsense_dataset_taus(const spinsense_dataset* dataset, double* taus_out) {
    return guarded([&] {
        require(dataset, "dataset");
        require(taus_out, "taus_out");
        const auto& taus = dataset->impl.schedule.taus;
        std::memcpy(taus_out, taus.data(), taus.size() * sizeof(double));
    });
}

size_t spinsense_dataset_record_count(const spinsense_dataset* dataset) {
    return dataset != nullptr ? dataset->impl.counts.size() : 0;
}

spinsense_status spinsense_dataset_record(const spinsense_dataset* dataset, size_t index,
                                          int* outcomes_out, uint64_t* count_out) {
    return guarded([&] {
        require(dataset, "dataset");
        require(outcomes_out, "outcomes_out");
        require(count_out, "count_out");
        if (index >= dataset->impl.counts.size())
            throw std::invalid_argument("record index out of range");
        auto it = dataset->impl.counts.begin();
        std::advance(it, index);
        for (size_t i = 0; i < it->first.size(); ++i)
            outcomes_out[i] = it->first[i] == spinsense::Outcome::Up ? 1 : 0;
        *count_out = it->second;
    });
}

spinsense_status spinsense_dataset_prefix(const spinsense_dataset* dataset, int k,
                                          spinsense_dataset** out) {
    return guarded([&] {
        require(dataset, "dataset");
        require(out, "out");
        *out = new spinsense_dataset{dataset->impl.prefix(k)};
    });
}

spinsense_status spinsense_dataset_save(const spinsense_dataset* dataset, const char* path) {
    return guarded([&] {
        require(dataset, "dataset");
        require(path, "path");
        dataset->impl.save_file(path);
    });
}

spinsense_status spinsense_dataset_load(const char* path, spinsense_dataset** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new spinsense_dataset{spinsense::Dataset::load_file(path)};
    });
}

spinsense_status spinsense_posterior_compute(spinsense_model* model,
                                             const spinsense_dataset* dataset, double grid_lo,
                                             double grid_hi, int grid_points, int workers,
                                             spinsense_posterior** out) {
    return guarded([&] {
        require(model, "model");
        require(dataset, "dataset");
        require(out, "out");
        if (dataset->impl.sites != model->impl.sites())
            throw std::invalid_argument("dataset was generated for a different chain size");
        const auto grid = spinsense::FieldGrid::uniform(grid_lo, grid_hi, grid_points);
        spinsense::WorkerPool pool(effective_workers(workers));
        *out = new spinsense_posterior{
            spinsense::compute_posterior(dataset->impl, model->impl, grid, &pool)};
    });
}

spinsense_status spinsense_posterior_uniform(double grid_lo, double grid_hi, int grid_points,
                                             spinsense_posterior** out) {
    return guarded([&] {
        require(out, "out");
        const auto grid = spinsense::FieldGrid::uniform(grid_lo, grid_hi, grid_points);
        spinsense::Posterior post;
        post.grid = grid;
        post.density = Eigen::VectorXd::Constant(grid.points, 1.0 / (grid.hi - grid.lo));
        *out = new spinsense_posterior{std::move(post)};
    });
}

void spinsense_posterior_free(spinsense_posterior* posterior) { delete posterior; }

int spinsense_posterior_points(const spinsense_posterior* posterior) {
    return posterior != nullptr ? posterior->impl.grid.points : 0;
}

spinsense_status spinsense_posterior_copy(const spinsense_posterior* posterior, double* grid_out,
                                          double* density_out) {
    return guarded([&] {
        require(posterior, "posterior");
        require(grid_out, "grid_out");
        require(density_out, "density_out");
        const auto& impl = posterior->impl;
        for (int i = 0; i < impl.grid.points; ++i) {
            grid_out[i] = impl.grid.value(i);
            density_out[i] = impl.density(i);
        }
    });
}

spinsense_status spinsense_posterior_mean(const spinsense_posterior* posterior, double* out) {
    return guarded([&] {
        require(posterior, "posterior");
        require(out, "out");
        *out = posterior->impl.mean();
    });
}

spinsense_status spinsense_posterior_variance(const spinsense_posterior* posterior, double* out) {
    return guarded([&] {
        require(posterior, "posterior");
        require(out, "out");
        *out = posterior->impl.variance();
    });
}

spinsense_status spinsense_posterior_error_summary(const spinsense_posterior* posterior,
                                                   double b_true, double* mean_out,
                                                   double* variance_out, double* delta_b2_out) {
    return guarded([&] {
        require(posterior, "posterior");
        require(mean_out, "mean_out");
        require(variance_out, "variance_out");
        require(delta_b2_out, "delta_b2_out");
        const auto s = spinsense::error_summary(posterior->impl, b_true);
        *mean_out = s.mean;
        *variance_out = s.variance;
        *delta_b2_out = s.delta_b2;
    });
}

spinsense_status spinsense_average_error(spinsense_model* model, double field_true,
                                         const double* taus, size_t n_seq, uint64_t m_samples,
                                         int repeats, double grid_lo, double grid_hi,
                                         int grid_points, int average_squared, uint64_t seed,
                                         uint64_t stream_tag, double* delta_b_bar_out,
                                         double* std_error_out) {
    return guarded([&] {
        require(model, "model");
        require(delta_b_bar_out, "delta_b_bar_out");
        require(std_error_out, "std_error_out");
        const spinsense::Schedule schedule = make_schedule(taus, n_seq);
        const auto grid = spinsense::FieldGrid::uniform(grid_lo, grid_hi, grid_points);
        const auto mode = average_squared != 0 ? spinsense::AverageMode::RootOfMeanSquare
                                               : spinsense::AverageMode::RootPerRepeat;
        const auto r = spinsense::average_error(model->impl, field_true, schedule, grid,
                                                m_samples, repeats, seed, stream_tag, mode);
        *delta_b_bar_out = r.delta_b_bar;
        *std_error_out = r.std_error;
    });
}

spinsense_status spinsense_total_time(double t_evo, double init_ratio, double meas_ratio,
                                      int n_seq, uint64_t m_samples, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = spinsense::total_time({t_evo, init_ratio, meas_ratio}, n_seq, m_samples);
    });
}

spinsense_status spinsense_matched_samples(double init_ratio, double meas_ratio, int n_seq,
                                           uint64_t m_seq, uint64_t* out) {
    return guarded([&] {
        require(out, "out");
        *out = spinsense::matched_samples({1.0, init_ratio, meas_ratio}, n_seq, m_seq);
    });
}

spinsense_status spinsense_fit_loglog(const double* x, const double* y, size_t n,
                                      double window_lo, double window_hi, double* slope_out,
                                      double* intercept_out, double* residual_out) {
    return guarded([&] {
        require(x, "x");
        require(y, "y");
        require(slope_out, "slope_out");
        require(intercept_out, "intercept_out");
        require(residual_out, "residual_out");
        const auto fit = spinsense::fit_loglog({x, n}, {y, n}, to_window(window_lo, window_hi));
        *slope_out = fit.slope;
        *intercept_out = fit.intercept;
        *residual_out = fit.residual;
    });
}

spinsense_status spinsense_extract_scaling(const double* fields, const double* total_times,
                                           const double* errors, size_t n_cells, double b_lo,
                                           double b_hi, double t_lo, double t_hi,
                                           double* delta_mean_out, double* delta_spread_out,
                                           double* amplitude_out, double* alpha_out,
                                           double* residual_out) {
    return guarded([&] {
        require(fields, "fields");
        require(total_times, "total_times");
        require(errors, "errors");
        require(delta_mean_out, "delta_mean_out");
        require(delta_spread_out, "delta_spread_out");
        require(amplitude_out, "amplitude_out");
        require(alpha_out, "alpha_out");
        require(residual_out, "residual_out");
        std::vector<spinsense::ErrorCell> cells(n_cells);
        for (size_t i = 0; i < n_cells; ++i) {
            cells[i].n_seq = 1;  // single-group pipeline; the tag is unused here
            cells[i].field = fields[i];
            cells[i].total_time = total_times[i];
            cells[i].delta_b_bar = errors[i];
        }
        const auto fit = spinsense::extract_scaling(cells, to_window(b_lo, b_hi),
                                                    to_window(t_lo, t_hi));
        *delta_mean_out = fit.delta_mean;
        *delta_spread_out = fit.delta_spread;
        *amplitude_out = fit.amplitude;
        *alpha_out = fit.alpha;
        *residual_out = fit.residual;
    });
}

spinsense_status spinsense_error_sweep(spinsense_model* model,
                                       const spinsense_sweep_params* params,
                                       spinsense_progress_fn progress, void* user,
                                       spinsense_error_table** out) {
    return guarded([&] {
        require(model, "model");
        require(params, "params");
        require(out, "out");
        spinsense::SweepPlan plan;
        require(params->n_seq_list, "n_seq_list");
        require(params->field_list, "field_list");
        require(params->sample_list, "sample_list");
        plan.n_seq_list.assign(params->n_seq_list, params->n_seq_list + params->n_seq_count);
        plan.field_list.assign(params->field_list, params->field_list + params->field_count);
        plan.sample_list.assign(params->sample_list, params->sample_list + params->sample_count);
        plan.tau_first = params->tau_first;
        plan.tau_step = params->tau_step;
        if (params->taus != nullptr && params->tau_count > 0)
            plan.explicit_taus.assign(params->taus, params->taus + params->tau_count);
        plan.grid =
            spinsense::FieldGrid::uniform(params->grid_lo, params->grid_hi, params->grid_points);
        plan.repeats = params->repeats;
        plan.mode = params->average_squared != 0 ? spinsense::AverageMode::RootOfMeanSquare
                                                 : spinsense::AverageMode::RootPerRepeat;
        plan.init_ratio = params->init_ratio;
        plan.meas_ratio = params->meas_ratio;
        plan.master_seed = params->seed;

        spinsense::WorkerPool pool(effective_workers(params->workers));
        spinsense::ProgressFn cb;
        if (progress != nullptr)
            cb = [progress, user](std::size_t done, std::size_t total) {
                progress(done, total, user);
            };
        auto cells = spinsense::run_error_sweep(model->impl, plan, pool, cb);
        *out = new spinsense_error_table{std::move(cells)};
    });
}

void spinsense_error_table_free(spinsense_error_table* table) { delete table; }

size_t spinsense_error_table_rows(const spinsense_error_table* table) {
    return table != nullptr ? table->cells.size() : 0;
}

spinsense_status spinsense_error_table_row(const spinsense_error_table* table, size_t index,
                                           int* n_seq_out, double* field_out,
                                           uint64_t* m_samples_out, double* total_time_out,
                                           double* delta_b_bar_out, double* std_error_out) {
    return guarded([&] {
        require(table, "table");
        if (index >= table->cells.size())
            throw std::invalid_argument("error-table row index out of range");
        const auto& c = table->cells[index];
        if (n_seq_out != nullptr)
            *n_seq_out = c.n_seq;
        if (field_out != nullptr)
            *field_out = c.field;
        if (m_samples_out != nullptr)
            *m_samples_out = c.m_samples;
        if (total_time_out != nullptr)
            *total_time_out = c.total_time;
        if (delta_b_bar_out != nullptr)
            *delta_b_bar_out = c.delta_b_bar;
        if (std_error_out != nullptr)
            *std_error_out = c.std_error;
    });
}

} // extern "C"
