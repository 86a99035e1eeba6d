#include "core/sweep.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

namespace spinsense {

WorkerPool::WorkerPool(int workers) : workers_(workers) {
    if (workers < 1)
        throw std::invalid_argument("WorkerPool: workers must be >= 1");
}

void WorkerPool::parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0)
        return;
    const int threads = int(std::min<std::size_t>(std::size_t(workers_), count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> crew;
    crew.reserve(threads - 1);
    for (int t = 1; t < threads; ++t)
        crew.emplace_back(worker);
    worker();
    for (std::thread& t : crew)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

void SweepPlan::validate() const {
    if (n_seq_list.empty() || field_list.empty() || sample_list.empty())
        throw std::invalid_argument("SweepPlan: n_seq, field, and sample lists must be nonempty");
    for (int n : n_seq_list)
        if (n < 1)
            throw std::invalid_argument("SweepPlan: n_seq must be >= 1");
    for (std::uint64_t m : sample_list)
        if (m < 1)
            throw std::invalid_argument("SweepPlan: sample counts must be >= 1");
    if (!explicit_taus.empty()) {
        if (n_seq_list.size() != 1 ||
            std::size_t(n_seq_list.front()) != explicit_taus.size())
            throw std::invalid_argument(
                "SweepPlan: an explicit tau list requires a single matching n_seq");
    }
    grid.validate();
    if (repeats < 1)
        throw std::invalid_argument("SweepPlan: repeats must be >= 1");
    TimeBudget{1.0, init_ratio, meas_ratio}.validate();
}

Schedule SweepPlan::schedule_for(int n_seq) const {
    if (!explicit_taus.empty()) {
        Schedule s;
        s.taus = explicit_taus;
        s.validate();
        return s;
    }
    return Schedule::arithmetic(n_seq, tau_first, tau_step);
}

std::vector<ErrorCell> run_error_sweep(const ChainModel& model, const SweepPlan& plan,
                                       WorkerPool& pool, const ProgressFn& progress) {
    plan.validate();
    const std::size_t total = plan.cell_count();
    std::vector<ErrorCell> table(total);
    std::atomic<std::size_t> done{0};
    std::size_t base_index = 0;

    for (int n_seq : plan.n_seq_list) {
        const Schedule schedule = plan.schedule_for(n_seq);
        const TimeBudget budget{schedule.mean_tau(), plan.init_ratio, plan.meas_ratio};

        // Shared per-n_seq precomputations: the grid-wide probability table
        // and one branch distribution per true field.
        std::optional<ProbabilityTable> prob_table;
        if (n_seq <= ProbabilityTable::kMaxTableSeq)
            prob_table.emplace(model, schedule, plan.grid, &pool);
        std::vector<SequenceDistribution> dists;
        dists.reserve(plan.field_list.size());
        for (double field : plan.field_list)
            dists.emplace_back(model, field, schedule);

        const std::size_t block = plan.field_list.size() * plan.sample_list.size();
        pool.parallel_for(block, [&](std::size_t local) {
            const std::size_t fi = local / plan.sample_list.size();
            const std::size_t mi = local % plan.sample_list.size();
            const std::size_t manifest_index = base_index + local;

            ErrorCell& cell = table[manifest_index];
            cell.n_seq = n_seq;
            cell.field = plan.field_list[fi];
            cell.m_samples = plan.sample_list[mi];
            cell.total_time = total_time(budget, n_seq, cell.m_samples);
            cell.stream_tag = manifest_index;

            const AverageErrorResult r = average_error(
                model, cell.field, schedule, plan.grid, cell.m_samples, plan.repeats,
                plan.master_seed, cell.stream_tag, plan.mode,
                prob_table ? &*prob_table : nullptr, &dists[fi], nullptr);
            cell.delta_b_bar = r.delta_b_bar;
            cell.std_error = r.std_error;

            const std::size_t finished = done.fetch_add(1) + 1;
            if (progress)
                progress(finished, total);
        });
        base_index += block;
    }
    return table;
}

} // namespace spinsense
