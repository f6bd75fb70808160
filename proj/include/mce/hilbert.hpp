#pragma once

// Two-qubit / multimode-field state types and coherent-state algebra.
//
// Qubit basis ordering (0-based row index in every 4x4 matrix):
//   0 = |dn dn>, 1 = |dn up>, 2 = |up dn>, 3 = |up up>
// i.e. row = 2*q1 + q2 with up = 1. Qubit 1 is the leading tensor factor.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mce/errors.hpp"

namespace mce {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr int kQubitDim = 4;

using CoherentVector = Eigen::VectorXcd;
using QubitAmplitudes = Eigen::Vector4cd;
using DensityMatrix4 = Eigen::Matrix4cd;

/// Label of a computational basis state, 1-based as in |1>..|4>.
class QubitBasisIndex {
public:
    constexpr explicit QubitBasisIndex(int label) : label_(label) {
        if (label < 1 || label > 4) throw DimensionError("qubit basis label must be in 1..4");
    }
    constexpr int label() const noexcept { return label_; }
    constexpr int row() const noexcept { return label_ - 1; }
    /// Number of excited qubits.
    constexpr int ups() const noexcept { return ((label_ - 1) >> 1) + ((label_ - 1) & 1); }

    friend constexpr bool operator==(QubitBasisIndex, QubitBasisIndex) = default;

private:
    int label_;
};

/// Sign of the CZ gate on basis row `row`: -1 on |up up>, +1 elsewhere.
constexpr double cz_sign(int row) noexcept { return row == 3 ? -1.0 : 1.0; }

inline QubitAmplitudes basis_amplitudes(QubitBasisIndex l) {
    QubitAmplitudes a = QubitAmplitudes::Zero();
    a(l.row()) = 1.0;
    return a;
}

/// One grid element: a product coherent state with four qubit amplitudes.
/// Amplitudes are stored relative to the accumulated phase factor exp(i*phase).
struct Configuration {
    CoherentVector center;
    QubitAmplitudes amplitudes = QubitAmplitudes::Zero();
    double phase = 0.0;
};

/// <a|b> for normalized multimode coherent states.
inline cplx coherent_overlap(const CoherentVector& a, const CoherentVector& b) {
    if (a.size() != b.size()) throw DimensionError("coherent_overlap: mode count mismatch");
    const cplx expo = a.dot(b) - 0.5 * a.squaredNorm() - 0.5 * b.squaredNorm();
    return std::exp(expo);
}

/// Gram matrix Omega_jk = <z_j|z_k> for the columns of `centers` (M x N).
inline Eigen::MatrixXcd gram_matrix(const Eigen::MatrixXcd& centers) {
    const Eigen::Index n = centers.cols();
    const Eigen::MatrixXcd inner = centers.adjoint() * centers;
    const Eigen::VectorXd sq = centers.colwise().squaredNorm().transpose();
    Eigen::MatrixXcd omega(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < n; ++j)
            omega(j, k) = std::exp(inner(j, k) - 0.5 * (sq(j) + sq(k)));
    return omega;
}

/// N configurations of M modes, stored column-wise for the dynamics kernels:
/// centers is M x N, amplitudes N x 4, phases N.
class McEState {
public:
    McEState() = default;

    McEState(Eigen::MatrixXcd centers, Eigen::MatrixXcd amplitudes, Eigen::VectorXd phases,
             double time = 0.0)
        : centers_(std::move(centers)),
          amplitudes_(std::move(amplitudes)),
          phases_(std::move(phases)),
          time_(time) {
        validate();
    }

    explicit McEState(const std::vector<Configuration>& configs, double time = 0.0) : time_(time) {
        if (configs.empty()) throw DimensionError("McEState needs at least one configuration");
        const auto n = static_cast<Eigen::Index>(configs.size());
        const Eigen::Index m = configs.front().center.size();
        centers_.resize(m, n);
        amplitudes_.resize(n, kQubitDim);
        phases_.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& c = configs[static_cast<std::size_t>(j)];
            if (c.center.size() != m) throw DimensionError("configurations disagree on mode count");
            centers_.col(j) = c.center;
            amplitudes_.row(j) = c.amplitudes.transpose();
            phases_(j) = c.phase;
        }
        validate();
    }

    Eigen::Index size() const noexcept { return centers_.cols(); }
    Eigen::Index modes() const noexcept { return centers_.rows(); }
    double time() const noexcept { return time_; }

    const Eigen::MatrixXcd& centers() const noexcept { return centers_; }
    const Eigen::MatrixXcd& amplitudes() const noexcept { return amplitudes_; }
    const Eigen::VectorXd& phases() const noexcept { return phases_; }

    Configuration configuration(Eigen::Index j) const {
        return Configuration{centers_.col(j), amplitudes_.row(j).transpose(), phases_(j)};
    }

    std::vector<Configuration> configurations() const {
        std::vector<Configuration> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (Eigen::Index j = 0; j < size(); ++j) out.push_back(configuration(j));
        return out;
    }

    /// Physical amplitudes c_{l,j} = d_{l,j} exp(i S_j).
    Eigen::MatrixXcd physical_amplitudes() const {
        Eigen::MatrixXcd c = amplitudes_;
        for (Eigen::Index j = 0; j < size(); ++j) c.row(j) *= std::polar(1.0, phases_(j));
        return c;
    }

private:
    void validate() const {
        if (centers_.cols() < 1) throw DimensionError("McEState needs at least one configuration");
        if (amplitudes_.rows() != centers_.cols() || amplitudes_.cols() != kQubitDim)
            throw DimensionError("amplitude block must be N x 4");
        if (phases_.size() != centers_.cols()) throw DimensionError("phase vector must have N entries");
        if (!centers_.allFinite() || !amplitudes_.allFinite() || !phases_.allFinite())
            throw DomainError("McEState contains non-finite entries");
    }

    Eigen::MatrixXcd centers_;
    Eigen::MatrixXcd amplitudes_;
    Eigen::VectorXd phases_;
    double time_ = 0.0;
};

/// Gram matrix with the accumulated phases folded in:
/// Omega'_jk = exp(-i S_j) Omega_jk exp(i S_k).
inline Eigen::MatrixXcd phased_gram(const Eigen::MatrixXcd& omega, const Eigen::VectorXd& phases) {
    Eigen::MatrixXcd out = omega;
    for (Eigen::Index k = 0; k < out.cols(); ++k)
        for (Eigen::Index j = 0; j < out.rows(); ++j)
            out(j, k) *= std::polar(1.0, phases(k) - phases(j));
    return out;
}

/// Reduced two-qubit state rho_ln = <l| Tr_B |psi><psi| |n>.
inline DensityMatrix4 reduce_to_qubits(const McEState& state) {
    const Eigen::MatrixXcd omega_p = phased_gram(gram_matrix(state.centers()), state.phases());
    const Eigen::MatrixXcd& d = state.amplitudes();
    // (D^H Omega' D)_{nl} = sum_jk conj(d_{n,j}) Omega'_jk d_{l,k} = rho_ln
    const DensityMatrix4 m = d.adjoint() * omega_p * d;
    DensityMatrix4 rho = m.transpose();
    return 0.5 * (rho + rho.adjoint());
}

/// Tr(rho): the norm of the grid wavefunction.
inline double state_norm(const McEState& state) {
    return reduce_to_qubits(state).trace().real();
}

inline bool is_hermitian(const DensityMatrix4& rho, double tol) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

} // namespace mce
