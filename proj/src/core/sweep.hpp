#pragma once

#include "core/inference.hpp"
#include "core/scaling.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace spinsense {

/// Fixed-size pool running index-addressed jobs; results must be written to
/// pre-sized slots so completion order never matters.
class WorkerPool {
public:
    explicit WorkerPool(int workers);

    int workers() const { return workers_; }
    void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

private:
    int workers_;
};

/// Cross-product sweep over (n_seq, true field, sample count).  Schedules
/// follow the arithmetic rule unless an explicit tau list is given (then the
/// sweep must hold a single n_seq matching its length).
struct SweepPlan {
    std::vector<int> n_seq_list;
    std::vector<double> field_list;
    std::vector<std::uint64_t> sample_list;
    double tau_first = 6.0;
    double tau_step = 2.0;
    std::vector<double> explicit_taus;  // optional
    FieldGrid grid;
    int repeats = 100;
    AverageMode mode = AverageMode::RootPerRepeat;
    double init_ratio = 100.0;
    double meas_ratio = 10.0;
    std::uint64_t master_seed = 0;

    void validate() const;
    Schedule schedule_for(int n_seq) const;
    std::size_t cell_count() const {
        return n_seq_list.size() * field_list.size() * sample_list.size();
    }
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every cell of the plan.  Cell order in the result is the manifest
/// order (n_seq-major, then field, then samples); each cell's repeats draw
/// from streams derived from (master_seed, manifest index), so the table is
/// bit-reproducible for any worker count.
std::vector<ErrorCell> run_error_sweep(const ChainModel& model, const SweepPlan& plan,
                                       WorkerPool& pool, const ProgressFn& progress = {});

} // namespace spinsense
