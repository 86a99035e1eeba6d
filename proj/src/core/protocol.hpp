#pragma once

#include "core/chain.hpp"
#include "core/dynamics.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace spinsense {

/// Projective measurement outcome on the readout site N.
enum class Outcome : std::uint8_t { Down = 0, Up = 1 };

inline char outcome_char(Outcome o) { return o == Outcome::Up ? '+' : '-'; }

using OutcomeSequence = std::vector<Outcome>;

/// Branch probabilities below this are treated as dead: collapse refuses to
/// normalize them and the sampler never walks them.
inline constexpr double kZeroBranchProbability = 1e-14;

/// Evolution intervals tau_1..tau_n between consecutive measurements.
struct Schedule {
    std::vector<double> taus;

    /// tau_i = first + (i-1)*step; the paper's n=5 set {6,8,10,12,14}/J
    /// extended arithmetically for other lengths.
    static Schedule arithmetic(int n_seq, double first = 6.0, double step = 2.0);

    int length() const { return static_cast<int>(taus.size()); }
    double total_tau() const;
    double mean_tau() const { return total_tau() / length(); }
    void validate() const;
};

/// Multiset of outcome sequences from repeated runs of one protocol.
struct Dataset {
    int sites = 0;
    double coupling = 1.0;
    Schedule schedule;
    std::map<OutcomeSequence, std::uint64_t> counts;
    std::uint64_t samples = 0;  // sum of counts

    int n_seq() const { return schedule.length(); }
    void add(const OutcomeSequence& seq, std::uint64_t k = 1);
    void validate() const;

    /// Dataset over the first `k` measurements only (counts aggregated over
    /// the discarded suffix outcomes).
    Dataset prefix(int k) const;

    /// Line-oriented text format, one "+-..+ count" record per sequence.
    /// Round-trips bit exactly.
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static Dataset load(std::istream& in);
    static Dataset load_file(const std::string& path);
};

/// p_gamma = <psi| M_N^gamma |psi> for the projector onto `outcome` at the
/// last site, clamped to [0, 1] against roundoff.
double outcome_probability(const StateVector& state, Outcome outcome);

/// M_N^gamma |psi> / sqrt(p_gamma).  Throws std::domain_error when the
/// outcome probability is below kZeroBranchProbability.
StateVector collapse(const StateVector& state, Outcome outcome);

/// Shared sampling rule: draw Up when u < p_up, with dead branches never
/// taken.  Used by both run_sequence and SequenceDistribution::sample so the
/// two produce identical records from identical engines.
Outcome sample_outcome(double p_up, double u);

/// One sequential record: start from the ferromagnetic state, alternate free
/// evolution and sampled projective measurement without re-initialization.
OutcomeSequence run_sequence(const ChainModel& model, double field, const Schedule& schedule,
                             std::mt19937_64& rng);

/// Exact probability of `seq` under H(field): the product of conditional
/// outcome probabilities along the deterministic evolve/collapse branch.
/// Dead branches yield 0.
double sequence_probability(const ChainModel& model, double field, const Schedule& schedule,
                            const OutcomeSequence& seq);

/// All 2^n_seq branch probabilities of one (field, schedule) pair, computed
/// in a single depth-first pass that shares prefix states.  Leaf index bit i
/// holds the outcome of measurement i+1 (Up = 1).  Also provides O(n_seq)
/// sampling that is record-identical to run_sequence.
class SequenceDistribution {
public:
    SequenceDistribution(const ChainModel& model, double field, const Schedule& schedule);

    int n_seq() const { return n_seq_; }
    double field() const { return field_; }

    double probability(std::uint32_t leaf_index) const { return leaf_probs_[leaf_index]; }
    double probability(const OutcomeSequence& seq) const;
    const std::vector<double>& probabilities() const { return leaf_probs_; }

    OutcomeSequence sample(std::mt19937_64& rng) const;
    std::uint32_t sample_index(std::mt19937_64& rng) const;

    static std::uint32_t index_of(const OutcomeSequence& seq);
    static OutcomeSequence sequence_of(std::uint32_t index, int n_seq);

private:
    int n_seq_;
    double field_;
    std::vector<double> up_probs_;    // heap-indexed prefix tree, 2^n - 1 nodes
    std::vector<double> leaf_probs_;  // 2^n joint probabilities
};

/// M_sam independent records, each from a fresh ferromagnetic state.
Dataset generate_dataset(const ChainModel& model, double field, const Schedule& schedule,
                         std::uint64_t m_samples, std::mt19937_64& rng);

/// Same distribution and identical records for identical engines, but walks
/// the cached branch tree instead of re-evolving states per sample.
Dataset generate_dataset(const ChainModel& model, const SequenceDistribution& dist,
                         const Schedule& schedule, std::uint64_t m_samples,
                         std::mt19937_64& rng);

} // namespace spinsense
