#include "core/chain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinsense {

void ChainSpec::validate() const {
    if (sites < 1)
        throw std::invalid_argument("ChainSpec: sites must be >= 1, got " +
                                    std::to_string(sites));
    if (sites > kMaxSites)
        throw std::invalid_argument("ChainSpec: sites capped at " +
                                    std::to_string(kMaxSites) + " (dense 2^N matrices), got " +
                                    std::to_string(sites));
    if (!(coupling > 0.0))
        throw std::invalid_argument("ChainSpec: coupling must be > 0");
    if (!std::isfinite(field))
        throw std::invalid_argument("ChainSpec: field must be finite");
}

namespace {

void check_site(int site, int sites) {
    if (site < 1 || site > sites)
        throw std::invalid_argument("site " + std::to_string(site) +
                                    " out of range 1.." + std::to_string(sites));
}

} // namespace

Operator pauli_at(int site, PauliAxis axis, int sites) {
    check_site(site, sites);
    const Eigen::Index dim = Eigen::Index(1) << sites;
    const Eigen::Index mask = Eigen::Index(1) << site_bit(site, sites);
    Operator op = Operator::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const bool up = (i & mask) != 0;
        switch (axis) {
        case PauliAxis::X:
            op(i ^ mask, i) = 1.0;
            break;
        case PauliAxis::Y:
            // sigma_y |down> = -i |up>,  sigma_y |up> = +i |down>
            op(i ^ mask, i) = up ? Complex(0, 1) : Complex(0, -1);
            break;
        case PauliAxis::Z:
            op(i, i) = up ? 1.0 : -1.0;
            break;
        }
    }
    return op;
}

Operator build_hamiltonian(const ChainSpec& spec) {
    spec.validate();
    const Eigen::Index dim = spec.dimension();
    Operator h = Operator::Zero(dim, dim);
    const double j = spec.coupling;

    // sigma_j . sigma_{j+1} in bit form: zz contributes +-J on the diagonal,
    // xx + yy hops between the two antiparallel configurations with weight 2J.
    for (int bond = 1; bond < spec.sites; ++bond) {
        const Eigen::Index m1 = Eigen::Index(1) << site_bit(bond, spec.sites);
        const Eigen::Index m2 = Eigen::Index(1) << site_bit(bond + 1, spec.sites);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const bool b1 = (i & m1) != 0;
            const bool b2 = (i & m2) != 0;
            if (b1 == b2) {
                h(i, i) += j;
            } else {
                h(i, i) -= j;
                h(i ^ (m1 | m2), i) += 2.0 * j;
            }
        }
    }

    if (spec.field != 0.0) {
        const Eigen::Index mf = Eigen::Index(1) << site_bit(1, spec.sites);
        for (Eigen::Index i = 0; i < dim; ++i)
            h(i ^ mf, i) += spec.field;
    }
    return h;
}

StateVector ferromagnetic_state(int sites) {
    ChainSpec spec;
    spec.sites = sites;
    spec.validate();
    StateVector psi = StateVector::Zero(spec.dimension());
    psi(0) = 1.0;
    return psi;
}

double up_probability(const StateVector& state, int site) {
    const int sites = static_cast<int>(std::round(std::log2(double(state.size()))));
    check_site(site, sites);
    const Eigen::Index mask = Eigen::Index(1) << site_bit(site, sites);
    double p = 0.0;
    for (Eigen::Index i = 0; i < state.size(); ++i)
        if (i & mask)
            p += std::norm(state(i));
    return p;
}

double magnetization(const StateVector& state, int site) {
    const int sites = static_cast<int>(std::round(std::log2(double(state.size()))));
    check_site(site, sites);
    const Eigen::Index mask = Eigen::Index(1) << site_bit(site, sites);
    double p_up = 0.0;
    double p_down = 0.0;
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        if (i & mask)
            p_up += std::norm(state(i));
        else
            p_down += std::norm(state(i));
    }
    return p_up - p_down;
}

bool is_normalized(const StateVector& state, double tol) {
    return std::abs(state.norm() - 1.0) <= tol;
}

} // namespace spinsense
