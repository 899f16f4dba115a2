#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace veloq::statesim {

using amp_t = std::complex<double>;

// Pauli string over n qubits, e.g. "XZIIZ" (qubit 0 first).
struct PauliString {
    std::string ops;

    std::size_t size() const { return ops.size(); }
    bool commutes_with(const PauliString& other) const;
    static PauliString identity(std::size_t n);
};

// Gate kernels over a 2^n amplitude vector. Each kernel has a serial
// reference implementation and an OpenMP variant; the OpenMP variants are
// elementwise (no reductions), so their results are bit-identical to the
// serial ones. Expectation values use fixed-size chunk partial sums combined
// in index order, which keeps them deterministic under any thread count.
namespace kernels {

void apply_1q_serial(amp_t* amps, std::size_t n_amps, int target,
                     const Eigen::Matrix2cd& u);
void apply_1q_omp(amp_t* amps, std::size_t n_amps, int target, const Eigen::Matrix2cd& u);

// Diagonal two-qubit gate: phases on |00>,|01>,|10>,|11> of (q_low=a, q_high=b
// meaning bit a is the first label). Used for CZ and fly-by CZ.
void apply_diag2_serial(amp_t* amps, std::size_t n_amps, int qa, int qb,
                        const std::array<amp_t, 4>& diag);
void apply_diag2_omp(amp_t* amps, std::size_t n_amps, int qa, int qb,
                     const std::array<amp_t, 4>& diag);

// <psi| P |psi> (real part; exact).
double expectation_serial(const amp_t* amps, std::size_t n_amps, const PauliString& p);
double expectation_omp(const amp_t* amps, std::size_t n_amps, const PauliString& p);

double norm2_serial(const amp_t* amps, std::size_t n_amps);
double norm2_omp(const amp_t* amps, std::size_t n_amps);

// Probability of measuring |1> on target.
double prob_one_serial(const amp_t* amps, std::size_t n_amps, int target);

// Project target qubit onto `outcome` and renormalize; returns the outcome
// probability before projection.
double project_serial(amp_t* amps, std::size_t n_amps, int target, int outcome);

void scale_serial(amp_t* amps, std::size_t n_amps, double s);
void scale_omp(amp_t* amps, std::size_t n_amps, double s);

}  // namespace kernels

}  // namespace veloq::statesim
