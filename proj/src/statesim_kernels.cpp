#include "veloq/statesim_kernels.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace veloq::statesim {

bool PauliString::commutes_with(const PauliString& other) const {
    if (ops.size() != other.ops.size()) {
        throw std::invalid_argument("PauliString: length mismatch");
    }
    int anti = 0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        char a = ops[i], b = other.ops[i];
        if (a != 'I' && b != 'I' && a != b) ++anti;
    }
    return (anti % 2) == 0;
}

PauliString PauliString::identity(std::size_t n) {
    return {std::string(n, 'I')};
}

namespace kernels {

namespace {

// Pauli action bookkeeping: P|i> = c(i) |i ^ xmask>, with c(i) a product of
// per-qubit factors (Z: (-1)^b ; Y: i(-1)^b up to the X flip; X: 1).
struct PauliMasks {
    std::uint64_t xmask = 0;  // qubits with X or Y
    std::uint64_t zmask = 0;  // qubits with Z or Y
    int n_y = 0;
};

PauliMasks masks_of(const PauliString& p) {
    PauliMasks m;
    for (std::size_t q = 0; q < p.ops.size(); ++q) {
        switch (p.ops[q]) {
            case 'I': break;
            case 'X': m.xmask |= 1ULL << q; break;
            case 'Z': m.zmask |= 1ULL << q; break;
            case 'Y':
                m.xmask |= 1ULL << q;
                m.zmask |= 1ULL << q;
                ++m.n_y;
                break;
            default:
                throw std::invalid_argument("PauliString: bad character");
        }
    }
    return m;
}

inline int parity(std::uint64_t v) { return __builtin_parityll(v); }

constexpr std::size_t kChunk = 4096;

}  // namespace

void apply_1q_serial(amp_t* amps, std::size_t n_amps, int target, const Eigen::Matrix2cd& u) {
    const std::size_t mask = 1ULL << target;
    const std::size_t lo = mask - 1;
    const std::size_t hi = ~lo;
    const amp_t u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t i = 0; i < n_amps / 2; ++i) {
        std::size_t i0 = ((i & hi) << 1) | (i & lo);
        std::size_t i1 = i0 | mask;
        amp_t a0 = amps[i0], a1 = amps[i1];
        amps[i0] = u00 * a0 + u01 * a1;
        amps[i1] = u10 * a0 + u11 * a1;
    }
}

void apply_1q_omp(amp_t* amps, std::size_t n_amps, int target, const Eigen::Matrix2cd& u) {
    const std::size_t mask = 1ULL << target;
    const std::size_t lo = mask - 1;
    const std::size_t hi = ~lo;
    const amp_t u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    const auto half = static_cast<std::int64_t>(n_amps / 2);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < half; ++i) {
        std::size_t ui = static_cast<std::size_t>(i);
        std::size_t i0 = ((ui & hi) << 1) | (ui & lo);
        std::size_t i1 = i0 | mask;
        amp_t a0 = amps[i0], a1 = amps[i1];
        amps[i0] = u00 * a0 + u01 * a1;
        amps[i1] = u10 * a0 + u11 * a1;
    }
}

void apply_diag2_serial(amp_t* amps, std::size_t n_amps, int qa, int qb,
                        const std::array<amp_t, 4>& diag) {
    const std::size_t ma = 1ULL << qa;
    const std::size_t mb = 1ULL << qb;
    for (std::size_t i = 0; i < n_amps; ++i) {
        int idx = ((i & ma) ? 1 : 0) | ((i & mb) ? 2 : 0);
        amps[i] *= diag[static_cast<std::size_t>(idx)];
    }
}

void apply_diag2_omp(amp_t* amps, std::size_t n_amps, int qa, int qb,
                     const std::array<amp_t, 4>& diag) {
    const std::size_t ma = 1ULL << qa;
    const std::size_t mb = 1ULL << qb;
    const auto n = static_cast<std::int64_t>(n_amps);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        std::size_t ui = static_cast<std::size_t>(i);
        int idx = ((ui & ma) ? 1 : 0) | ((ui & mb) ? 2 : 0);
        amps[ui] *= diag[static_cast<std::size_t>(idx)];
    }
}

namespace {

inline double expectation_term(const amp_t* amps, std::size_t i, const PauliMasks& m,
                               const amp_t& y_factor) {
    amp_t c = y_factor * (parity(i & m.zmask) ? -1.0 : 1.0);
    return (std::conj(amps[i ^ m.xmask]) * c * amps[i]).real();
}

}  // namespace

double expectation_serial(const amp_t* amps, std::size_t n_amps, const PauliString& p) {
    PauliMasks m = masks_of(p);
    // i^n_y from the Y factors
    static const amp_t ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    amp_t y_factor = ipow[m.n_y % 4];
    double sum = 0.0;
    for (std::size_t i = 0; i < n_amps; ++i) {
        sum += expectation_term(amps, i, m, y_factor);
    }
    return sum;
}

double expectation_omp(const amp_t* amps, std::size_t n_amps, const PauliString& p) {
    PauliMasks m = masks_of(p);
    static const amp_t ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    amp_t y_factor = ipow[m.n_y % 4];
    const std::size_t n_chunks = (n_amps + kChunk - 1) / kChunk;
    std::vector<double> partial(n_chunks, 0.0);
    const auto nc = static_cast<std::int64_t>(n_chunks);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < nc; ++c) {
        std::size_t begin = static_cast<std::size_t>(c) * kChunk;
        std::size_t end = std::min(begin + kChunk, n_amps);
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            s += expectation_term(amps, i, m, y_factor);
        }
        partial[static_cast<std::size_t>(c)] = s;
    }
    double sum = 0.0;
    for (double s : partial) sum += s;  // fixed order
    return sum;
}

double norm2_serial(const amp_t* amps, std::size_t n_amps) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_amps; ++i) s += std::norm(amps[i]);
    return s;
}

double norm2_omp(const amp_t* amps, std::size_t n_amps) {
    const std::size_t n_chunks = (n_amps + kChunk - 1) / kChunk;
    std::vector<double> partial(n_chunks, 0.0);
    const auto nc = static_cast<std::int64_t>(n_chunks);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < nc; ++c) {
        std::size_t begin = static_cast<std::size_t>(c) * kChunk;
        std::size_t end = std::min(begin + kChunk, n_amps);
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += std::norm(amps[i]);
        partial[static_cast<std::size_t>(c)] = s;
    }
    double sum = 0.0;
    for (double s : partial) sum += s;
    return sum;
}

double prob_one_serial(const amp_t* amps, std::size_t n_amps, int target) {
    const std::size_t mask = 1ULL << target;
    double p = 0.0;
    for (std::size_t i = 0; i < n_amps; ++i) {
        if (i & mask) p += std::norm(amps[i]);
    }
    return p;
}

double project_serial(amp_t* amps, std::size_t n_amps, int target, int outcome) {
    const std::size_t mask = 1ULL << target;
    double p = 0.0;
    for (std::size_t i = 0; i < n_amps; ++i) {
        bool one = (i & mask) != 0;
        if (one == (outcome == 1)) {
            p += std::norm(amps[i]);
        } else {
            amps[i] = 0.0;
        }
    }
    if (p > 0.0) {
        double s = 1.0 / std::sqrt(p);
        for (std::size_t i = 0; i < n_amps; ++i) amps[i] *= s;
    }
    return p;
}

void scale_serial(amp_t* amps, std::size_t n_amps, double s) {
    for (std::size_t i = 0; i < n_amps; ++i) amps[i] *= s;
}

void scale_omp(amp_t* amps, std::size_t n_amps, double s) {
    const auto n = static_cast<std::int64_t>(n_amps);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) amps[static_cast<std::size_t>(i)] *= s;
}

}  // namespace kernels

}  // namespace veloq::statesim
