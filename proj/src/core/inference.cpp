#include "core/inference.hpp"

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace spinsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Compensated accumulation; the uniform-posterior moment checks sit at
/// 1e-12 over millions of grid points, beyond plain summation.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

} // namespace

FieldGrid FieldGrid::uniform(double lo, double hi, int points) {
    FieldGrid g{lo, hi, points};
    g.validate();
    return g;
}

void FieldGrid::validate() const {
    if (points < 3)
        throw std::invalid_argument("FieldGrid: needs at least 3 points");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("FieldGrid: require finite lo < hi");
}

std::vector<double> FieldGrid::values() const {
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i)
        out[i] = value(i);
    return out;
}

double Posterior::integral() const {
    KahanSum acc;
    for (int i = 0; i < grid.points; ++i)
        acc.add(grid.weight(i) * density(i));
    return acc.value();
}

double Posterior::mean() const {
    KahanSum acc;
    for (int i = 0; i < grid.points; ++i)
        acc.add(grid.weight(i) * grid.value(i) * density(i));
    return acc.value();
}

double Posterior::variance() const {
    const double m = mean();
    KahanSum acc;
    for (int i = 0; i < grid.points; ++i) {
        const double d = grid.value(i) - m;
        acc.add(grid.weight(i) * d * d * density(i));
    }
    return acc.value();
}

ProbabilityTable::ProbabilityTable(const ChainModel& model, const Schedule& schedule,
                                   const FieldGrid& grid, WorkerPool* pool)
    : grid_(grid), n_seq_(schedule.length()) {
    grid.validate();
    schedule.validate();
    if (n_seq_ > kMaxTableSeq)
        throw std::invalid_argument("ProbabilityTable: n_seq " + std::to_string(n_seq_) +
                                    " exceeds the dense-table cap " +
                                    std::to_string(kMaxTableSeq));
    const std::size_t cols = sequences();
    probs_.assign(std::size_t(grid.points) * cols, 0.0);
    log_probs_.assign(std::size_t(grid.points) * cols, -kInf);

    auto fill_row = [&](std::size_t row) {
        SequenceDistribution dist(model, grid_.value(int(row)), schedule);
        double* p = probs_.data() + row * cols;
        double* lp = log_probs_.data() + row * cols;
        for (std::size_t leaf = 0; leaf < cols; ++leaf) {
            p[leaf] = dist.probability(std::uint32_t(leaf));
            lp[leaf] = p[leaf] > 0.0 ? std::log(p[leaf]) : -kInf;
        }
    };
    if (pool != nullptr)
        pool->parallel_for(std::size_t(grid.points), fill_row);
    else
        for (std::size_t row = 0; row < std::size_t(grid.points); ++row)
            fill_row(row);
}

Eigen::VectorXd log_likelihood(const Dataset& dataset, const ProbabilityTable& table) {
    dataset.validate();
    if (dataset.n_seq() != table.n_seq())
        throw std::invalid_argument("log_likelihood: dataset/table n_seq mismatch");
    std::vector<std::pair<std::uint32_t, double>> observed;
    observed.reserve(dataset.counts.size());
    for (const auto& [seq, k] : dataset.counts)
        observed.emplace_back(SequenceDistribution::index_of(seq), double(k));

    Eigen::VectorXd out(table.grid().points);
    for (int row = 0; row < table.grid().points; ++row) {
        double acc = 0.0;
        for (const auto& [leaf, k] : observed)
            acc += k * table.log_probability(row, leaf);
        out(row) = acc;
    }
    return out;
}

namespace {

/// Depth-first over the trie of observed sequences (the sorted count map
/// groups shared prefixes into contiguous ranges), accumulating each
/// sequence's log probability for one grid point.
void pruned_log_probs(const SpectralDecomposition& decomp, const Schedule& schedule,
                      const std::vector<const OutcomeSequence*>& seqs, std::size_t begin,
                      std::size_t end, std::size_t level, const StateVector& state,
                      double log_prob, std::vector<double>& out) {
    const StateVector evolved = decomp.evolve(state, schedule.taus[level]);
    std::size_t lo = begin;
    while (lo < end) {
        const Outcome branch = (*seqs[lo])[level];
        std::size_t hi = lo;
        while (hi < end && (*seqs[hi])[level] == branch)
            ++hi;
        const double p = outcome_probability(evolved, branch);
        if (p <= kZeroBranchProbability) {
            for (std::size_t j = lo; j < hi; ++j)
                out[j] = -kInf;
        } else if (level + 1 == std::size_t(schedule.length())) {
            out[lo] = log_prob + std::log(p);
        } else {
            pruned_log_probs(decomp, schedule, seqs, lo, hi, level + 1,
                             collapse(evolved, branch), log_prob + std::log(p), out);
        }
        lo = hi;
    }
}

} // namespace

Eigen::VectorXd log_likelihood(const Dataset& dataset, const ChainModel& model,
                               const FieldGrid& grid) {
    dataset.validate();
    grid.validate();
    std::vector<const OutcomeSequence*> seqs;
    std::vector<double> weights;
    seqs.reserve(dataset.counts.size());
    for (const auto& [seq, k] : dataset.counts) {
        seqs.push_back(&seq);
        weights.push_back(double(k));
    }
    Eigen::VectorXd out(grid.points);
    std::vector<double> log_probs(seqs.size());
    for (int row = 0; row < grid.points; ++row) {
        const auto decomp = model.decomposition(grid.value(row));
        std::fill(log_probs.begin(), log_probs.end(), -kInf);
        pruned_log_probs(*decomp, dataset.schedule, seqs, 0, seqs.size(), 0,
                         ferromagnetic_state(model.sites()), 0.0, log_probs);
        double acc = 0.0;
        for (std::size_t j = 0; j < seqs.size(); ++j)
            acc += weights[j] * log_probs[j];
        out(row) = acc;
    }
    return out;
}

Posterior posterior_from_log_likelihood(const FieldGrid& grid, const Eigen::VectorXd& loglik) {
    grid.validate();
    if (loglik.size() != grid.points)
        throw std::invalid_argument("posterior: log-likelihood size does not match grid");

    double max_log = -kInf;
    for (int i = 0; i < grid.points; ++i)
        if (std::isfinite(loglik(i)) && loglik(i) > max_log)
            max_log = loglik(i);
    if (!std::isfinite(max_log))
        throw DegeneratePosteriorError(
            "posterior: every grid point assigns zero probability to the data");

    Posterior post;
    post.grid = grid;
    post.density.resize(grid.points);
    // Uniform prior: a constant factor that cancels in the normalization.
    for (int i = 0; i < grid.points; ++i)
        post.density(i) = std::isfinite(loglik(i)) ? std::exp(loglik(i) - max_log) : 0.0;
    const double z = post.integral();
    if (!(z > 0.0) || !std::isfinite(z))
        throw DegeneratePosteriorError("posterior: normalization integral is " +
                                       std::to_string(z));
    post.density /= z;
    return post;
}

Posterior compute_posterior(const Dataset& dataset, const ChainModel& model,
                            const FieldGrid& grid, WorkerPool* pool) {
    if (dataset.n_seq() <= ProbabilityTable::kMaxTableSeq) {
        ProbabilityTable table(model, dataset.schedule, grid, pool);
        return posterior_from_log_likelihood(grid, log_likelihood(dataset, table));
    }
    return posterior_from_log_likelihood(grid, log_likelihood(dataset, model, grid));
}

double ErrorSummary::delta_b() const { return std::sqrt(delta_b2); }

ErrorSummary error_summary(const Posterior& posterior, double b_true) {
    if (b_true == 0.0)
        throw std::invalid_argument("error_summary: b_true must be nonzero (relative error)");
    ErrorSummary s;
    s.mean = posterior.mean();
    s.variance = posterior.variance();
    const double bias = s.mean - b_true;
    s.delta_b2 = (s.variance + bias * bias) / (b_true * b_true);
    return s;
}

AverageErrorResult average_error(const ChainModel& model, double field_true,
                                 const Schedule& schedule, const FieldGrid& grid,
                                 std::uint64_t m_samples, int repeats,
                                 std::uint64_t master_seed, std::uint64_t stream_tag,
                                 AverageMode mode, const ProbabilityTable* table,
                                 const SequenceDistribution* dist, WorkerPool* pool) {
    if (repeats < 1)
        throw std::invalid_argument("average_error: repeats must be >= 1");
    if (m_samples < 1)
        throw std::invalid_argument("average_error: m_samples must be >= 1");

    std::optional<ProbabilityTable> own_table;
    if (table == nullptr && schedule.length() <= ProbabilityTable::kMaxTableSeq) {
        own_table.emplace(model, schedule, grid, pool);
        table = &*own_table;
    }
    std::optional<SequenceDistribution> own_dist;
    if (dist == nullptr) {
        own_dist.emplace(model, field_true, schedule);
        dist = &*own_dist;
    }

    std::vector<double> values(repeats);
    for (int r = 0; r < repeats; ++r) {
        auto engine = rng::stream(master_seed, {stream_tag, std::uint64_t(r)});
        const Dataset data = generate_dataset(model, *dist, schedule, m_samples, engine);
        try {
            const Eigen::VectorXd loglik = table != nullptr
                                               ? log_likelihood(data, *table)
                                               : log_likelihood(data, model, grid);
            const Posterior post = posterior_from_log_likelihood(grid, loglik);
            const ErrorSummary es = error_summary(post, field_true);
            values[r] = mode == AverageMode::RootPerRepeat ? es.delta_b() : es.delta_b2;
        } catch (const DegeneratePosteriorError& err) {
            throw DegeneratePosteriorError(std::string(err.what()) + " (repeat " +
                                           std::to_string(r) + ")");
        }
    }

    double sum = 0.0;
    for (double v : values)
        sum += v;
    const double mean = sum / repeats;
    double var = 0.0;
    for (double v : values)
        var += (v - mean) * (v - mean);
    var = repeats > 1 ? var / (repeats - 1) : 0.0;

    AverageErrorResult out;
    out.repeats = repeats;
    if (mode == AverageMode::RootPerRepeat) {
        out.delta_b_bar = mean;
        out.std_error = std::sqrt(var / repeats);
    } else {
        // averaged delta_b^2; report its root with first-order error propagation
        out.delta_b_bar = std::sqrt(mean);
        out.std_error = mean > 0.0 ? 0.5 * std::sqrt(var / repeats) / std::sqrt(mean) : 0.0;
    }
    return out;
}

} // namespace spinsense
