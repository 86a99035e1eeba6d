#pragma once

#include "core/chain.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace spinsense {

/// Eigenpairs of a Hermitian operator, eigenvalues ascending.  Immutable
/// after construction, so instances can be shared freely across threads.
class SpectralDecomposition {
public:
    static SpectralDecomposition compute(const Operator& hermitian);

    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXcd& eigenvectors() const { return eigenvectors_; }
    Eigen::Index dimension() const { return eigenvalues_.size(); }

    /// |psi(t)> = V exp(-i lambda t) V^dag |psi>.  Norm preserving.
    StateVector evolve(const StateVector& state, double t) const;

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd eigenvectors_;
};

SpectralDecomposition diagonalize(const Operator& hermitian);

/// A chain with fixed (sites, coupling); the field value is supplied per
/// request and the corresponding decomposition is cached.  The inference
/// sweeps evaluate hundreds of field values times many evolution intervals,
/// so each decomposition is computed once and reused.
class ChainModel {
public:
    ChainModel(int sites, double coupling);

    int sites() const { return sites_; }
    double coupling() const { return coupling_; }
    Eigen::Index dimension() const { return Eigen::Index(1) << sites_; }
    ChainSpec spec(double field) const { return ChainSpec{sites_, coupling_, field}; }

    /// Shared, lazily-built decomposition of H(field).  Thread safe.
    std::shared_ptr<const SpectralDecomposition> decomposition(double field) const;

    std::size_t cached_decompositions() const;

private:
    int sites_;
    double coupling_;
    mutable std::mutex mutex_;
    mutable std::map<double, std::shared_ptr<const SpectralDecomposition>> cache_;
};

} // namespace spinsense
