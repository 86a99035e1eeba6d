#include "core/protocol.hpp"

#include "core/rng.hpp"
#include "core/textio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spinsense {

Schedule Schedule::arithmetic(int n_seq, double first, double step) {
    if (n_seq < 1)
        throw std::invalid_argument("Schedule: n_seq must be >= 1");
    Schedule s;
    s.taus.reserve(n_seq);
    for (int i = 0; i < n_seq; ++i)
        s.taus.push_back(first + step * i);
    s.validate();
    return s;
}

double Schedule::total_tau() const {
    double sum = 0.0;
    for (double tau : taus)
        sum += tau;
    return sum;
}

void Schedule::validate() const {
    if (taus.empty())
        throw std::invalid_argument("Schedule: needs at least one interval");
    for (double tau : taus)
        if (!(tau > 0.0))
            throw std::invalid_argument("Schedule: every tau must be > 0");
}

void Dataset::add(const OutcomeSequence& seq, std::uint64_t k) {
    if (static_cast<int>(seq.size()) != n_seq())
        throw std::invalid_argument("Dataset: sequence length does not match schedule");
    counts[seq] += k;
    samples += k;
}

void Dataset::validate() const {
    schedule.validate();
    std::uint64_t total = 0;
    for (const auto& [seq, k] : counts) {
        if (static_cast<int>(seq.size()) != n_seq())
            throw std::invalid_argument("Dataset: sequence length does not match schedule");
        total += k;
    }
    if (total != samples)
        throw std::invalid_argument("Dataset: counts sum to " + std::to_string(total) +
                                    " but samples = " + std::to_string(samples));
    if (samples == 0)
        throw std::invalid_argument("Dataset: empty (samples must be >= 1)");
}

Dataset Dataset::prefix(int k) const {
    if (k < 1 || k > n_seq())
        throw std::invalid_argument("Dataset::prefix: k out of range");
    Dataset out;
    out.sites = sites;
    out.coupling = coupling;
    out.schedule.taus.assign(schedule.taus.begin(), schedule.taus.begin() + k);
    for (const auto& [seq, c] : counts) {
        OutcomeSequence head(seq.begin(), seq.begin() + k);
        out.counts[head] += c;
    }
    out.samples = samples;
    return out;
}

void Dataset::save(std::ostream& out) const {
    validate();
    out << "# spinsense dataset v1\n";
    out << "# sites=" << sites << " coupling=" << format_double(coupling)
        << " n_seq=" << n_seq() << "\n";
    out << "# taus=";
    for (double tau : schedule.taus)
        out << ' ' << format_double(tau);
    out << "\n# samples=" << samples << "\n";
    for (const auto& [seq, k] : counts) {
        std::string s;
        s.reserve(seq.size());
        for (Outcome o : seq)
            s.push_back(outcome_char(o));
        out << s << ' ' << k << "\n";
    }
}

void Dataset::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    save(out);
    if (!out)
        throw std::runtime_error("write to " + path + " failed");
}

namespace {

std::string expect_prefix(const std::string& line, const std::string& prefix) {
    if (line.rfind(prefix, 0) != 0)
        throw std::runtime_error("dataset parse: expected '" + prefix + "', got '" + line + "'");
    return line.substr(prefix.size());
}

} // namespace

Dataset Dataset::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "# spinsense dataset v1")
        throw std::runtime_error("dataset parse: bad magic line");

    Dataset d;
    int n_seq = 0;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset parse: truncated header");
    {
        std::istringstream fields(expect_prefix(line, "# "));
        std::string tok;
        while (fields >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("dataset parse: bad header token '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            if (key == "sites")
                d.sites = std::stoi(val);
            else if (key == "coupling")
                d.coupling = std::strtod(val.c_str(), nullptr);
            else if (key == "n_seq")
                n_seq = std::stoi(val);
            else
                throw std::runtime_error("dataset parse: unknown header key '" + key + "'");
        }
    }
    if (!std::getline(in, line))
        throw std::runtime_error("dataset parse: truncated header");
    {
        std::istringstream taus(expect_prefix(line, "# taus="));
        double tau;
        while (taus >> tau)
            d.schedule.taus.push_back(tau);
    }
    if (static_cast<int>(d.schedule.taus.size()) != n_seq)
        throw std::runtime_error("dataset parse: taus count does not match n_seq");
    std::uint64_t declared = 0;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset parse: truncated header");
    declared = std::stoull(expect_prefix(line, "# samples="));

    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream rec(line);
        std::string pattern;
        std::uint64_t count = 0;
        if (!(rec >> pattern >> count))
            throw std::runtime_error("dataset parse: bad record '" + line + "'");
        if (static_cast<int>(pattern.size()) != n_seq)
            throw std::runtime_error("dataset parse: record length mismatch in '" + line + "'");
        OutcomeSequence seq;
        seq.reserve(pattern.size());
        for (char c : pattern) {
            if (c == '+')
                seq.push_back(Outcome::Up);
            else if (c == '-')
                seq.push_back(Outcome::Down);
            else
                throw std::runtime_error("dataset parse: bad outcome char in '" + line + "'");
        }
        d.add(seq, count);
    }
    if (d.samples != declared)
        throw std::runtime_error("dataset parse: records sum to " + std::to_string(d.samples) +
                                 " but header declares " + std::to_string(declared));
    d.validate();
    return d;
}

Dataset Dataset::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return load(in);
}

double outcome_probability(const StateVector& state, Outcome outcome) {
    // Measurement site fixed to N, which is bit 0 of the basis index.
    double p = 0.0;
    const Eigen::Index want = outcome == Outcome::Up ? 1 : 0;
    for (Eigen::Index i = 0; i < state.size(); ++i)
        if ((i & 1) == want)
            p += std::norm(state(i));
    return std::clamp(p, 0.0, 1.0);
}

StateVector collapse(const StateVector& state, Outcome outcome) {
    const double p = outcome_probability(state, outcome);
    if (p <= kZeroBranchProbability)
        throw std::domain_error("collapse: outcome probability " + std::to_string(p) +
                                " below the zero-branch threshold");
    const double inv = 1.0 / std::sqrt(p);
    const Eigen::Index want = outcome == Outcome::Up ? 1 : 0;
    StateVector out = StateVector::Zero(state.size());
    for (Eigen::Index i = 0; i < state.size(); ++i)
        if ((i & 1) == want)
            out(i) = state(i) * inv;
    return out;
}

Outcome sample_outcome(double p_up, double u) {
    bool up = u < p_up;
    // Never walk a dead branch, whatever u says.
    if (up && p_up <= kZeroBranchProbability)
        up = false;
    else if (!up && 1.0 - p_up <= kZeroBranchProbability)
        up = true;
    return up ? Outcome::Up : Outcome::Down;
}

OutcomeSequence run_sequence(const ChainModel& model, double field, const Schedule& schedule,
                             std::mt19937_64& rng) {
    schedule.validate();
    const auto decomp = model.decomposition(field);
    StateVector state = ferromagnetic_state(model.sites());
    OutcomeSequence record;
    record.reserve(schedule.taus.size());
    for (double tau : schedule.taus) {
        state = decomp->evolve(state, tau);
        const double p_up = outcome_probability(state, Outcome::Up);
        const Outcome got = sample_outcome(p_up, rng::unit_double(rng));
        state = collapse(state, got);
        record.push_back(got);
    }
    return record;
}

double sequence_probability(const ChainModel& model, double field, const Schedule& schedule,
                            const OutcomeSequence& seq) {
    schedule.validate();
    if (seq.size() != schedule.taus.size())
        throw std::invalid_argument("sequence_probability: sequence length mismatch");
    const auto decomp = model.decomposition(field);
    StateVector state = ferromagnetic_state(model.sites());
    double prob = 1.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        state = decomp->evolve(state, schedule.taus[i]);
        const double p = outcome_probability(state, seq[i]);
        prob *= p;
        if (p <= kZeroBranchProbability)
            return 0.0;
        state = collapse(state, seq[i]);
    }
    return prob;
}

SequenceDistribution::SequenceDistribution(const ChainModel& model, double field,
                                           const Schedule& schedule)
    : n_seq_(schedule.length()), field_(field) {
    schedule.validate();
    if (n_seq_ > 20)
        throw std::invalid_argument("SequenceDistribution: n_seq capped at 20 (2^n branches)");
    up_probs_.assign((std::size_t(1) << n_seq_) - 1, 0.0);
    leaf_probs_.assign(std::size_t(1) << n_seq_, 0.0);

    const auto decomp = model.decomposition(field);

    // Depth-first over the outcome tree, evolving and collapsing with the
    // exact same primitives as run_sequence/sequence_probability so every
    // cached value is bit-identical to a standalone evaluation.
    auto descend = [&](auto&& self, int level, std::uint32_t prefix, const StateVector& state,
                       double prob) -> void {
        const StateVector evolved = decomp->evolve(state, schedule.taus[level]);
        const double p_up = outcome_probability(evolved, Outcome::Up);
        up_probs_[(std::size_t(1) << level) - 1 + prefix] = p_up;
        for (Outcome got : {Outcome::Down, Outcome::Up}) {
            const double p = outcome_probability(evolved, got);
            const double branch_prob = prob * p;
            const std::uint32_t child =
                prefix | (std::uint32_t(got == Outcome::Up ? 1 : 0) << level);
            if (p <= kZeroBranchProbability)
                continue;  // dead branch; its leaves stay at probability 0
            if (level + 1 == n_seq_) {
                leaf_probs_[child] = branch_prob;
            } else {
                self(self, level + 1, child, collapse(evolved, got), branch_prob);
            }
        }
    };
    descend(descend, 0, 0, ferromagnetic_state(model.sites()), 1.0);
}

double SequenceDistribution::probability(const OutcomeSequence& seq) const {
    if (static_cast<int>(seq.size()) != n_seq_)
        throw std::invalid_argument("SequenceDistribution: sequence length mismatch");
    return leaf_probs_[index_of(seq)];
}

std::uint32_t SequenceDistribution::sample_index(std::mt19937_64& rng) const {
    std::uint32_t prefix = 0;
    for (int level = 0; level < n_seq_; ++level) {
        const double p_up = up_probs_[(std::size_t(1) << level) - 1 + prefix];
        const Outcome got = sample_outcome(p_up, rng::unit_double(rng));
        prefix |= std::uint32_t(got == Outcome::Up ? 1 : 0) << level;
    }
    return prefix;
}

OutcomeSequence SequenceDistribution::sample(std::mt19937_64& rng) const {
    return sequence_of(sample_index(rng), n_seq_);
}

std::uint32_t SequenceDistribution::index_of(const OutcomeSequence& seq) {
    std::uint32_t index = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
        index |= std::uint32_t(seq[i] == Outcome::Up ? 1 : 0) << i;
    return index;
}

OutcomeSequence SequenceDistribution::sequence_of(std::uint32_t index, int n_seq) {
    OutcomeSequence seq(n_seq);
    for (int i = 0; i < n_seq; ++i)
        seq[i] = (index >> i) & 1 ? Outcome::Up : Outcome::Down;
    return seq;
}

Dataset generate_dataset(const ChainModel& model, double field, const Schedule& schedule,
                         std::uint64_t m_samples, std::mt19937_64& rng) {
    if (m_samples < 1)
        throw std::invalid_argument("generate_dataset: m_samples must be >= 1");
    Dataset d;
    d.sites = model.sites();
    d.coupling = model.coupling();
    d.schedule = schedule;
    for (std::uint64_t m = 0; m < m_samples; ++m)
        d.add(run_sequence(model, field, schedule, rng));
    return d;
}

Dataset generate_dataset(const ChainModel& model, const SequenceDistribution& dist,
                         const Schedule& schedule, std::uint64_t m_samples,
                         std::mt19937_64& rng) {
    if (m_samples < 1)
        throw std::invalid_argument("generate_dataset: m_samples must be >= 1");
    if (dist.n_seq() != schedule.length())
        throw std::invalid_argument("generate_dataset: distribution/schedule length mismatch");
    std::vector<std::uint64_t> histogram(std::size_t(1) << dist.n_seq(), 0);
    for (std::uint64_t m = 0; m < m_samples; ++m)
        ++histogram[dist.sample_index(rng)];
    Dataset d;
    d.sites = model.sites();
    d.coupling = model.coupling();
    d.schedule = schedule;
    for (std::uint32_t leaf = 0; leaf < histogram.size(); ++leaf)
        if (histogram[leaf] > 0)
            d.add(SequenceDistribution::sequence_of(leaf, dist.n_seq()), histogram[leaf]);
    return d;
}

} // namespace spinsense
