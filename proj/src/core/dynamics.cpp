#include "core/dynamics.hpp"

#include "core/errors.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

namespace spinsense {

SpectralDecomposition SpectralDecomposition::compute(const Operator& hermitian) {
    if (hermitian.rows() != hermitian.cols())
        throw std::invalid_argument("diagonalize: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigensolver failed to converge on a " +
                             std::to_string(hermitian.rows()) + "x" +
                             std::to_string(hermitian.cols()) + " matrix");
    SpectralDecomposition out;
    out.eigenvalues_ = solver.eigenvalues();
    out.eigenvectors_ = solver.eigenvectors();
    return out;
}

SpectralDecomposition diagonalize(const Operator& hermitian) {
    return SpectralDecomposition::compute(hermitian);
}

StateVector SpectralDecomposition::evolve(const StateVector& state, double t) const {
    if (state.size() != eigenvalues_.size())
        throw std::invalid_argument("evolve: state dimension " +
                                    std::to_string(state.size()) + " does not match " +
                                    std::to_string(eigenvalues_.size()));
    if (t < 0.0)
        throw std::invalid_argument("evolve: t must be >= 0");
    Eigen::VectorXcd coeffs = eigenvectors_.adjoint() * state;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coeffs(k) *= std::polar(1.0, -eigenvalues_(k) * t);
    return eigenvectors_ * coeffs;
}

ChainModel::ChainModel(int sites, double coupling) : sites_(sites), coupling_(coupling) {
    ChainSpec{sites, coupling, 0.0}.validate();
}

std::shared_ptr<const SpectralDecomposition> ChainModel::decomposition(double field) const {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(field);
        if (it != cache_.end())
            return it->second;
    }
    // Diagonalize outside the lock; concurrent first requests for the same
    // field may race, the first insert wins and duplicates are dropped.
    auto decomp = std::make_shared<const SpectralDecomposition>(
        SpectralDecomposition::compute(build_hamiltonian(spec(field))));
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = cache_.emplace(field, std::move(decomp));
    return it->second;
}

std::size_t ChainModel::cached_decompositions() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

} // namespace spinsense
