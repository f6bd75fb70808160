#pragma once

// Normal-ordered matrix elements of the two-qubit / M-mode Hamiltonians
//
//   spin-boson:    H = sum_j [eps sz_j + Delta_j sx_j] + sum_m w_m a_m^+ a_m
//                      + sum_{j,m} g_m^(j) sx_j (a_m + a_m^+)
//   rotating-wave: coupling replaced by g_m^(j) (s+_j a_m + s-_j a_m^+)
//
// Qubit terms are counted once per qubit, mode terms once per mode.

#include <array>
#include <string_view>

#include "mce/hilbert.hpp"

namespace mce {

enum class Variant { SpinBoson, RotatingWave };

/// s+ = (sx + i sy)/2 (Half) or sx + i sy (Paper, twice as large).
enum class PauliPlusConvention { Half, Paper };

enum class QubitOperator { SigmaX1, SigmaX2, SigmaZ1, SigmaZ2, SigmaPlus1, SigmaPlus2, SigmaMinus1, SigmaMinus2 };

namespace detail {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

// single-qubit basis order (dn, up)
inline Mat2 pauli_x() { return (Mat2() << 0, 1, 1, 0).finished(); }
inline Mat2 pauli_z() { return (Mat2() << -1, 0, 0, 1).finished(); }
inline Mat2 raise() { return (Mat2() << 0, 0, 1, 0).finished(); }  // |up><dn|

inline Mat4 on_qubit(int which, const Mat2& op) {
    Mat4 out = Mat4::Zero();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const int r1 = r >> 1, r2 = r & 1, c1 = c >> 1, c2 = c & 1;
            if (which == 0)
                out(r, c) = (r2 == c2) ? op(r1, c1) : 0.0;
            else
                out(r, c) = (r1 == c1) ? op(r2, c2) : 0.0;
        }
    return out;
}

} // namespace detail

inline Eigen::Matrix4d qubit_operator(QubitOperator which,
                                      PauliPlusConvention conv = PauliPlusConvention::Half) {
    using namespace detail;
    const double scale = conv == PauliPlusConvention::Paper ? 2.0 : 1.0;
    switch (which) {
    case QubitOperator::SigmaX1: return on_qubit(0, pauli_x());
    case QubitOperator::SigmaX2: return on_qubit(1, pauli_x());
    case QubitOperator::SigmaZ1: return on_qubit(0, pauli_z());
    case QubitOperator::SigmaZ2: return on_qubit(1, pauli_z());
    case QubitOperator::SigmaPlus1: return scale * on_qubit(0, raise());
    case QubitOperator::SigmaPlus2: return scale * on_qubit(1, raise());
    case QubitOperator::SigmaMinus1: return scale * on_qubit(0, raise().transpose());
    case QubitOperator::SigmaMinus2: return scale * on_qubit(1, raise().transpose());
    }
    return Eigen::Matrix4d::Zero();
}

inline cplx qubit_operator_element(QubitOperator which, QubitBasisIndex l, QubitBasisIndex n,
                                   PauliPlusConvention conv = PauliPlusConvention::Half) {
    return qubit_operator(which, conv)(l.row(), n.row());
}

struct HamiltonianSpec {
    Variant variant = Variant::RotatingWave;
    double epsilon = 0.0;
    std::array<double, 2> delta{0.0, 0.0};
    Eigen::VectorXd frequencies;
    Eigen::MatrixXd couplings;  // M x 2, column j = qubit j
    PauliPlusConvention pauli_plus = PauliPlusConvention::Half;

    Eigen::Index modes() const noexcept { return frequencies.size(); }

    void validate() const {
        if (frequencies.size() < 1) throw DimensionError("HamiltonianSpec: need at least one mode");
        if (couplings.rows() != frequencies.size() || couplings.cols() != 2)
            throw DimensionError("HamiltonianSpec: couplings must be M x 2");
        if (!frequencies.allFinite() || !couplings.allFinite() || !std::isfinite(epsilon) ||
            !std::isfinite(delta[0]) || !std::isfinite(delta[1]))
            throw DomainError("HamiltonianSpec: non-finite parameter");
        if ((frequencies.array() < 0.0).any()) throw DomainError("HamiltonianSpec: negative frequency");
    }
};

/// Uniform couplings g^(j)_m = g_j for every mode.
inline HamiltonianSpec make_uniform_spec(Variant variant, Eigen::VectorXd frequencies, double g1, double g2,
                                         double epsilon = 0.0, double delta1 = 0.0, double delta2 = 0.0) {
    HamiltonianSpec s;
    s.variant = variant;
    s.epsilon = epsilon;
    s.delta = {delta1, delta2};
    const Eigen::Index m = frequencies.size();
    s.frequencies = std::move(frequencies);
    s.couplings.resize(m, 2);
    s.couplings.col(0).setConstant(g1);
    s.couplings.col(1).setConstant(g2);
    s.validate();
    return s;
}

/// Operator pieces of a spec, precomputed once per trajectory.
/// Normalized element between <a| and |b>:
///   Q + 1 * (a^* . w b) + sum_q [ K_q (g_q . b) + L_q (g_q . a)^* ]
struct HamiltonianTerms {
    Eigen::Matrix4d qubit;                 // Q
    std::array<Eigen::Matrix4d, 2> ket;    // K_q, multiplies sum_m g b_m
    std::array<Eigen::Matrix4d, 2> bra;    // L_q, multiplies sum_m g a_m^*
    Eigen::VectorXd frequencies;
    Eigen::MatrixXd couplings;

    explicit HamiltonianTerms(const HamiltonianSpec& spec) {
        spec.validate();
        using Q = QubitOperator;
        qubit = spec.epsilon * (qubit_operator(Q::SigmaZ1) + qubit_operator(Q::SigmaZ2)) +
                spec.delta[0] * qubit_operator(Q::SigmaX1) + spec.delta[1] * qubit_operator(Q::SigmaX2);
        if (spec.variant == Variant::SpinBoson) {
            ket = {qubit_operator(Q::SigmaX1), qubit_operator(Q::SigmaX2)};
            bra = ket;
        } else {
            ket = {qubit_operator(Q::SigmaPlus1, spec.pauli_plus), qubit_operator(Q::SigmaPlus2, spec.pauli_plus)};
            bra = {qubit_operator(Q::SigmaMinus1, spec.pauli_plus),
                   qubit_operator(Q::SigmaMinus2, spec.pauli_plus)};
        }
        frequencies = spec.frequencies;
        couplings = spec.couplings;
    }

    /// 4x4 normalized element block between coherent states a (bra) and b (ket).
    Eigen::Matrix4cd block(const CoherentVector& a, const CoherentVector& b) const {
        if (a.size() != frequencies.size() || b.size() != frequencies.size())
            throw DimensionError("matrix element: mode count mismatch");
        const cplx free = a.dot(frequencies.cast<cplx>().cwiseProduct(b));
        Eigen::Matrix4cd h = qubit.cast<cplx>();
        h.diagonal().array() += free;
        for (int q = 0; q < 2; ++q) {
            const Eigen::VectorXcd g = couplings.col(q).cast<cplx>();
            const cplx gb = g.dot(b);                 // sum_m g b_m
            const cplx ga_conj = a.dot(g);            // sum_m g a_m^*
            h += ket[static_cast<std::size_t>(q)].cast<cplx>() * gb +
                 bra[static_cast<std::size_t>(q)].cast<cplx>() * ga_conj;
        }
        return h;
    }
};

/// <l,a|H|n,b> / <a|b>.
inline cplx matrix_element(const HamiltonianSpec& spec, QubitBasisIndex l, const CoherentVector& a,
                           QubitBasisIndex n, const CoherentVector& b) {
    return HamiltonianTerms(spec).block(a, b)(l.row(), n.row());
}

/// Amplitude-weighted energy <c,z|H|c,z> / |c|^2 of a single configuration.
inline double mean_field_energy(const HamiltonianSpec& spec, const Configuration& cfg) {
    const double w = cfg.amplitudes.squaredNorm();
    if (!(w > 0.0)) throw DegenerateConfigurationError("mean_field_energy: zero amplitude norm");
    const Eigen::Matrix4cd h = HamiltonianTerms(spec).block(cfg.center, cfg.center);
    return (cfg.amplitudes.adjoint() * h * cfg.amplitudes)(0, 0).real() / w;
}

/// sum_{l,n} c_l^* c_n d/d(alpha_m) <alpha,l|H|alpha,n> / |c|^2, alpha and alpha^* independent.
inline cplx mean_field_gradient(const HamiltonianSpec& spec, const Configuration& cfg, Eigen::Index m) {
    if (m < 0 || m >= spec.modes() || cfg.center.size() != spec.modes())
        throw DimensionError("mean_field_gradient: mode index out of range");
    const double w = cfg.amplitudes.squaredNorm();
    if (!(w > 0.0)) throw DegenerateConfigurationError("mean_field_gradient: zero amplitude norm");
    const HamiltonianTerms terms(spec);
    cplx grad = spec.frequencies(m) * std::conj(cfg.center(m));
    for (int q = 0; q < 2; ++q) {
        const cplx expect =
            (cfg.amplitudes.adjoint() * terms.ket[static_cast<std::size_t>(q)].cast<cplx>() * cfg.amplitudes)(0, 0) / w;
        grad += spec.couplings(m, q) * expect;
    }
    return grad;
}

} // namespace mce
