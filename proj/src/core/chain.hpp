#pragma once

#include <Eigen/Dense>
#include <complex>

namespace spinsense {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using Operator = Eigen::MatrixXcd;

/// Basis convention shared by every module: basis index bit (sites - j)
/// encodes site j (1-based), so site 1 is the most significant bit and the
/// measured site N is bit 0.  Bit value 0 is spin-down, 1 is spin-up.  The
/// ferromagnetic all-down state is basis index 0.
inline int site_bit(int site, int sites) { return sites - site; }

enum class PauliAxis { X, Y, Z };

/// Chain of spin-1/2 sites with nearest-neighbour exchange `coupling` and a
/// transverse field `field` on site 1.
struct ChainSpec {
    int sites = 1;
    double coupling = 1.0;  // J, the unit of energy
    double field = 0.0;     // B, same units as J

    void validate() const;
    Eigen::Index dimension() const { return Eigen::Index(1) << sites; }
};

/// Largest chain the dense representation accepts (dimension 4096).
inline constexpr int kMaxSites = 12;

/// Single-site Pauli operator embedded in the full 2^sites space.
Operator pauli_at(int site, PauliAxis axis, int sites);

/// H = J * sum_j sigma_j . sigma_{j+1} + B * sigma_1^x  (Pauli matrices,
/// hbar = 1, times in units of 1/J).
Operator build_hamiltonian(const ChainSpec& spec);

/// All-spins-down product state (basis index 0).
StateVector ferromagnetic_state(int sites);

/// <sigma_site^z> = p_up - p_down for a normalized state.
double magnetization(const StateVector& state, int site);

/// Probability of finding `site` in the spin-up state.
double up_probability(const StateVector& state, int site);

bool is_normalized(const StateVector& state, double tol = 1e-10);

} // namespace spinsense
