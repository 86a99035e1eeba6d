#pragma once

#include "core/dynamics.hpp"
#include "core/protocol.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace spinsense {

class WorkerPool;

/// Uniformly spaced field values carrying the prior support.
struct FieldGrid {
    double lo = -0.2;
    double hi = 0.2;
    int points = 401;

    static FieldGrid uniform(double lo, double hi, int points);
    void validate() const;

    double spacing() const { return (hi - lo) / (points - 1); }
    double value(int i) const { return lo + spacing() * i; }
    /// Trapezoid quadrature weight of point i.
    double weight(int i) const {
        const double h = spacing();
        return (i == 0 || i == points - 1) ? 0.5 * h : h;
    }
    std::vector<double> values() const;
};

/// Discretized probability density over a FieldGrid; trapezoid integral 1.
struct Posterior {
    FieldGrid grid;
    Eigen::VectorXd density;

    double integral() const;
    double mean() const;
    double variance() const;
};

/// Posterior moments plus the dimensionless squared relative error
/// (sigma^2 + (<B> - B_true)^2) / B_true^2.
struct ErrorSummary {
    double mean = 0.0;
    double variance = 0.0;
    double delta_b2 = 0.0;

    double delta_b() const;
};

/// Joint probability of every outcome sequence at every grid point, built
/// once per (model, schedule, grid) and reused across datasets and repeats.
/// Entries are bit-identical to standalone sequence_probability calls.
class ProbabilityTable {
public:
    ProbabilityTable(const ChainModel& model, const Schedule& schedule, const FieldGrid& grid,
                     WorkerPool* pool = nullptr);

    const FieldGrid& grid() const { return grid_; }
    int n_seq() const { return n_seq_; }
    std::size_t sequences() const { return std::size_t(1) << n_seq_; }

    double probability(int grid_index, std::uint32_t leaf) const {
        return probs_[std::size_t(grid_index) * sequences() + leaf];
    }
    double log_probability(int grid_index, std::uint32_t leaf) const {
        return log_probs_[std::size_t(grid_index) * sequences() + leaf];
    }

    /// Largest n_seq the dense table accepts; beyond it use the pruned path.
    static constexpr int kMaxTableSeq = 12;

private:
    FieldGrid grid_;
    int n_seq_;
    std::vector<double> probs_;
    std::vector<double> log_probs_;
};

/// Per grid point: sum_j k_j log f(gamma_j | B).  The multinomial
/// coefficient of the likelihood is omitted; it does not depend on B and
/// cancels in the posterior normalization (and overflows for large M_sam).
/// Entries may be -inf where some observed sequence is impossible.
Eigen::VectorXd log_likelihood(const Dataset& dataset, const ProbabilityTable& table);

/// Table-free evaluation sharing prefix states across the observed
/// sequences; used when 2^n_seq makes the dense table impractical.
Eigen::VectorXd log_likelihood(const Dataset& dataset, const ChainModel& model,
                               const FieldGrid& grid);

/// Bayes update of the uniform prior on the grid interval: density
/// proportional to exp(log-likelihood), max-log subtracted, trapezoid
/// normalized.  Throws DegeneratePosteriorError when every grid point has
/// zero likelihood.
Posterior posterior_from_log_likelihood(const FieldGrid& grid, const Eigen::VectorXd& loglik);

Posterior compute_posterior(const Dataset& dataset, const ChainModel& model,
                            const FieldGrid& grid, WorkerPool* pool = nullptr);

/// Eq.-style relative error against the true field; b_true must be nonzero.
ErrorSummary error_summary(const Posterior& posterior, double b_true);

/// Whether the repeat average runs over delta_b or over delta_b^2.
enum class AverageMode { RootPerRepeat, RootOfMeanSquare };

struct AverageErrorResult {
    double delta_b_bar = 0.0;
    double std_error = 0.0;
    int repeats = 0;
};

/// Mean relative error over independent protocol repeats.  Repeat r draws
/// its dataset from the stream (master_seed, stream_tag, r), so cells and
/// repeats can run anywhere without changing the result.
AverageErrorResult average_error(const ChainModel& model, double field_true,
                                 const Schedule& schedule, const FieldGrid& grid,
                                 std::uint64_t m_samples, int repeats,
                                 std::uint64_t master_seed, std::uint64_t stream_tag,
                                 AverageMode mode = AverageMode::RootPerRepeat,
                                 const ProbabilityTable* table = nullptr,
                                 const SequenceDistribution* dist = nullptr,
                                 WorkerPool* pool = nullptr);

} // namespace spinsense
