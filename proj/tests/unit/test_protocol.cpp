#include "core/protocol.hpp"

#include "core/rng.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

using namespace spinsense;

namespace {

OutcomeSequence seq_of(std::initializer_list<int> bits) {
    OutcomeSequence s;
    for (int b : bits)
        s.push_back(b ? Outcome::Up : Outcome::Down);
    return s;
}

} // namespace

TEST_CASE("outcome probabilities of product and superposition states") {
    SUBCASE("ferromagnetic state never reads up") {
        const StateVector fm = ferromagnetic_state(3);
        CHECK(outcome_probability(fm, Outcome::Down) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(outcome_probability(fm, Outcome::Up) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("(|dd> + |du>)/sqrt(2) reads up half the time") {
        StateVector psi = StateVector::Zero(4);
        psi(0) = 1.0 / std::sqrt(2.0);
        psi(1) = 1.0 / std::sqrt(2.0);  // |down, up>
        CHECK(outcome_probability(psi, Outcome::Up) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(outcome_probability(psi, Outcome::Up) +
                  outcome_probability(psi, Outcome::Down) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("collapse projects and renormalizes") {
    SUBCASE("eigenstate of the projector is unchanged") {
        const StateVector fm = ferromagnetic_state(2);
        const StateVector out = collapse(fm, Outcome::Down);
        CHECK((out - fm).norm() < 1e-14);
    }
    SUBCASE("Bell-like state collapses onto the matching branch") {
        StateVector psi = StateVector::Zero(4);
        psi(0) = 1.0 / std::sqrt(2.0);  // |dd>
        psi(3) = 1.0 / std::sqrt(2.0);  // |uu>
        const StateVector up = collapse(psi, Outcome::Up);
        CHECK(std::abs(up(3) - Complex(1, 0)) < 1e-12);
        CHECK(magnetization(up, 2) == doctest::Approx(1.0).epsilon(1e-10));
        // idempotence: probability of the same outcome is now 1
        CHECK(outcome_probability(up, Outcome::Up) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("dead branch is refused") {
        const StateVector fm = ferromagnetic_state(2);
        CHECK_THROWS_AS(collapse(fm, Outcome::Up), std::domain_error);
    }
    SUBCASE("collapsed readout site shows a full jump") {
        const ChainModel model(4, 1.0);
        const auto d = model.decomposition(0.15);
        StateVector psi = d->evolve(ferromagnetic_state(4), 9.0);
        for (Outcome got : {Outcome::Down, Outcome::Up}) {
            const StateVector c = collapse(psi, got);
            const double target = got == Outcome::Up ? 1.0 : -1.0;
            CHECK(std::abs(magnetization(c, 4) - target) < 1e-10);
            CHECK(std::abs(c.norm() - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("run_sequence at zero field always reads all-down") {
    const ChainModel model(4, 1.0);
    const Schedule sched = Schedule::arithmetic(5);
    auto rng = rng::stream(123, {});
    for (int k = 0; k < 10; ++k) {
        const OutcomeSequence seq = run_sequence(model, 0.0, sched, rng);
        for (Outcome o : seq)
            CHECK(o == Outcome::Down);
    }
}

TEST_CASE("schedule construction") {
    const Schedule s = Schedule::arithmetic(5);
    CHECK(s.taus == std::vector<double>{6, 8, 10, 12, 14});
    CHECK(s.mean_tau() == doctest::Approx(10.0));
    CHECK(Schedule::arithmetic(1).taus == std::vector<double>{6});
    CHECK(Schedule::arithmetic(7).taus == std::vector<double>{6, 8, 10, 12, 14, 16, 18});
    CHECK_THROWS_AS(Schedule::arithmetic(0), std::invalid_argument);
    Schedule bad;
    bad.taus = {6.0, -1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sequence_probability basics") {
    const ChainModel model(3, 1.0);
    const Schedule sched = Schedule::arithmetic(3);
    SUBCASE("zero field concentrates on all-down") {
        CHECK(sequence_probability(model, 0.0, sched, seq_of({0, 0, 0})) ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sequence_probability(model, 0.0, sched, seq_of({0, 1, 0})) == 0.0);
    }
    SUBCASE("single measurement: p(up) + p(down) = 1") {
        const Schedule one = Schedule::arithmetic(1);
        const double pu = sequence_probability(model, 0.1, one, seq_of({1}));
        const double pd = sequence_probability(model, 0.1, one, seq_of({0}));
        CHECK(pu + pd == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("branch completeness for small trees") {
        for (double field : {0.05, 0.12}) {
            for (int n = 1; n <= 4; ++n) {
                const Schedule sched_n = Schedule::arithmetic(n);
                double total = 0.0;
                for (std::uint32_t leaf = 0; leaf < (1u << n); ++leaf)
                    total += sequence_probability(model, field, sched_n,
                                                  SequenceDistribution::sequence_of(leaf, n));
                CHECK(std::abs(total - 1.0) < 1e-10);
            }
        }
    }
}

TEST_CASE("SequenceDistribution matches per-sequence evaluation bit for bit") {
    const ChainModel model(4, 1.0);
    const Schedule sched = Schedule::arithmetic(4);
    for (double field : {0.0, 0.08, 0.2}) {
        const SequenceDistribution dist(model, field, sched);
        for (std::uint32_t leaf = 0; leaf < 16; ++leaf) {
            const OutcomeSequence seq = SequenceDistribution::sequence_of(leaf, 4);
            CHECK(dist.probability(leaf) == sequence_probability(model, field, sched, seq));
        }
    }
}

TEST_CASE("tree-walk dataset equals per-sample run_sequence dataset") {
    const ChainModel model(3, 1.0);
    const Schedule sched = Schedule::arithmetic(4);
    const double field = 0.11;
    const SequenceDistribution dist(model, field, sched);

    auto rng_naive = rng::stream(2024, {7});
    auto rng_tree = rng::stream(2024, {7});
    const Dataset a = generate_dataset(model, field, sched, 400, rng_naive);
    const Dataset b = generate_dataset(model, dist, sched, 400, rng_tree);
    CHECK(a.counts == b.counts);
    CHECK(a.samples == b.samples);
    CHECK(rng_naive() == rng_tree());  // both consumed the same draws
}

TEST_CASE("sampled frequencies match exact probabilities") {
    // 1e5 records at N=3, n_seq=2: every branch within 3 binomial sigma.
    const ChainModel model(3, 1.0);
    const Schedule sched = Schedule::arithmetic(2);
    const double field = 0.15;
    const SequenceDistribution dist(model, field, sched);
    const std::uint64_t m = 100000;
    auto rng = rng::stream(5150, {});
    const Dataset data = generate_dataset(model, dist, sched, m, rng);
    for (std::uint32_t leaf = 0; leaf < 4; ++leaf) {
        const double p = dist.probability(leaf);
        const auto it = data.counts.find(SequenceDistribution::sequence_of(leaf, 2));
        const double observed = it == data.counts.end() ? 0.0 : double(it->second);
        const double sigma = std::sqrt(double(m) * p * (1.0 - p));
        CHECK(std::abs(observed - double(m) * p) <= 3.0 * sigma + 1.0);
    }
}

TEST_CASE("datasets are reproducible and seed-sensitive") {
    const ChainModel model(3, 1.0);
    const Schedule sched = Schedule::arithmetic(3);
    const SequenceDistribution dist(model, 0.1, sched);

    auto r1 = rng::stream(99, {1});
    auto r2 = rng::stream(99, {1});
    auto r3 = rng::stream(99, {2});
    const Dataset a = generate_dataset(model, dist, sched, 500, r1);
    const Dataset b = generate_dataset(model, dist, sched, 500, r2);
    const Dataset c = generate_dataset(model, dist, sched, 500, r3);
    CHECK(a.counts == b.counts);
    CHECK(a.counts != c.counts);

    // chi-square homogeneity across seeds: statistic below the 99.9%
    // quantile for 7 degrees of freedom (8 branches).
    double chi2 = 0.0;
    for (std::uint32_t leaf = 0; leaf < 8; ++leaf) {
        const double expected = 500.0 * dist.probability(leaf);
        if (expected < 1e-9)
            continue;
        const auto it = c.counts.find(SequenceDistribution::sequence_of(leaf, 3));
        const double observed = it == c.counts.end() ? 0.0 : double(it->second);
        chi2 += (observed - expected) * (observed - expected) / expected;
    }
    CHECK(chi2 < 24.32);
}

TEST_CASE("generate_dataset rejects an empty request") {
    const ChainModel model(2, 1.0);
    const Schedule sched = Schedule::arithmetic(2);
    auto rng = rng::stream(1, {});
    CHECK_THROWS_AS(generate_dataset(model, 0.1, sched, 0, rng), std::invalid_argument);
}

TEST_CASE("dataset text format round-trips bit exactly") {
    Dataset d;
    d.sites = 5;
    d.coupling = 1.0 / 3.0;  // forces the 17-digit path
    d.schedule.taus = {6.0, 8.0, 0.1 + 0.2, 12.000000000000002};
    d.add(seq_of({0, 1, 0, 1}), 17);
    d.add(seq_of({0, 0, 0, 0}), 983);
    d.add(seq_of({1, 1, 1, 1}), 1);

    std::ostringstream out;
    d.save(out);
    std::istringstream in(out.str());
    const Dataset back = Dataset::load(in);
    CHECK(back.sites == d.sites);
    CHECK(back.coupling == d.coupling);
    CHECK(back.schedule.taus == d.schedule.taus);
    CHECK(back.counts == d.counts);
    CHECK(back.samples == d.samples);

    std::ostringstream again;
    back.save(again);
    CHECK(again.str() == out.str());
}

TEST_CASE("dataset prefix aggregates suffix counts") {
    Dataset d;
    d.sites = 3;
    d.schedule.taus = {6, 8, 10};
    d.add(seq_of({0, 1, 0}), 5);
    d.add(seq_of({0, 1, 1}), 7);
    d.add(seq_of({1, 0, 0}), 2);
    const Dataset p = d.prefix(2);
    CHECK(p.n_seq() == 2);
    CHECK(p.samples == d.samples);
    CHECK(p.counts.at(seq_of({0, 1})) == 12);
    CHECK(p.counts.at(seq_of({1, 0})) == 2);
    CHECK_THROWS_AS(d.prefix(0), std::invalid_argument);
    CHECK_THROWS_AS(d.prefix(4), std::invalid_argument);
}

TEST_CASE("dataset load rejects malformed input") {
    std::istringstream bad_magic("# nope\n");
    CHECK_THROWS(Dataset::load(bad_magic));

    std::istringstream bad_sum("# spinsense dataset v1\n# sites=2 coupling=1 n_seq=2\n"
                               "# taus= 6 8\n# samples=10\n-- 3\n");
    CHECK_THROWS(Dataset::load(bad_sum));
}
