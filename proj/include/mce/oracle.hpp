#pragma once

// Reference propagators in an explicit Fock representation.
//
//  * FockTruncation: every mode truncated at n_max (optionally also a cap on
//    the total photon number), dense diagonalization of the full Hamiltonian.
//  * rwa_sector_solve: rotating-wave Hamiltonian with Delta = 0 conserves
//    qubit ups + photons, so vacuum-start inputs live in sectors 0, 1, 2.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mce/dynamics.hpp"
#include "mce/errors.hpp"
#include "mce/hamiltonian.hpp"
#include "mce/hilbert.hpp"

namespace mce {

struct FockTruncation {
    int n_max = 6;
    int modes = 1;
    std::optional<int> total_cap;      // optional bound on sum_m n_m
    std::size_t max_dimension = 8192;  // budget on 4 * (#Fock states)

    void validate() const {
        if (n_max < 1) throw ConfigError("oracle.n_max must be >= 1");
        if (modes < 1) throw ConfigError("FockTruncation: modes must be >= 1");
        if (total_cap && *total_cap < 0) throw ConfigError("FockTruncation: total cap must be >= 0");
    }
};

using Occupation = std::vector<int>;

/// States |l> (x) |n_1..n_M> kept in a truncated representation.
class ProductBasis {
public:
    struct State {
        int row;  // qubit row 0..3
        Occupation fock;
    };

    void add(int row, const Occupation& fock) {
        const auto key = std::make_pair(row, fock);
        if (index_.count(key)) return;
        index_.emplace(key, static_cast<Eigen::Index>(states_.size()));
        states_.push_back({row, fock});
    }

    Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(states_.size()); }
    const State& operator[](Eigen::Index i) const { return states_[static_cast<std::size_t>(i)]; }

    std::optional<Eigen::Index> find(int row, const Occupation& fock) const {
        const auto it = index_.find(std::make_pair(row, fock));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<State> states_;
    std::map<std::pair<int, Occupation>, Eigen::Index> index_;
};

namespace detail {

// All occupations with n_m <= n_max and sum <= cap, in lexicographic order.
inline std::vector<Occupation> enumerate_occupations(int modes, int n_max, int cap, std::size_t budget) {
    std::vector<Occupation> out;
    Occupation cur(static_cast<std::size_t>(modes), 0);
    auto rec = [&](auto&& self, int m, int left) -> void {
        if (m == modes) {
            if (out.size() >= budget) throw BudgetError("Fock basis exceeds the configured dimension budget");
            out.push_back(cur);
            return;
        }
        for (int n = 0; n <= std::min(n_max, left); ++n) {
            cur[static_cast<std::size_t>(m)] = n;
            self(self, m + 1, left - n);
        }
        cur[static_cast<std::size_t>(m)] = 0;
    };
    rec(rec, 0, cap);
    return out;
}

} // namespace detail

/// Matrix of H on `basis`; transitions leaving the basis are dropped.
inline Eigen::MatrixXd hamiltonian_on_basis(const HamiltonianSpec& spec, const ProductBasis& basis) {
    const HamiltonianTerms terms(spec);
    const Eigen::Index dim = basis.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& s = basis[i];
        double free = 0.0;
        for (std::size_t m = 0; m < s.fock.size(); ++m) free += spec.frequencies(static_cast<Eigen::Index>(m)) * s.fock[m];
        h(i, i) += free;
        for (int l = 0; l < kQubitDim; ++l)
            if (auto j = basis.find(l, s.fock); j && terms.qubit(l, s.row) != 0.0) h(*j, i) += terms.qubit(l, s.row);
        // a_m |fock> = sqrt(n) |fock - e_m>; the paired a_m^+ element is the transpose entry.
        for (std::size_t m = 0; m < s.fock.size(); ++m) {
            const int n = s.fock[m];
            if (n == 0) continue;
            Occupation lower = s.fock;
            lower[m] -= 1;
            const double amp = std::sqrt(static_cast<double>(n));
            for (int q = 0; q < 2; ++q) {
                const double g = spec.couplings(static_cast<Eigen::Index>(m), q);
                if (g == 0.0) continue;
                const auto& ket = terms.ket[static_cast<std::size_t>(q)];
                const auto& bra = terms.bra[static_cast<std::size_t>(q)];
                for (int l = 0; l < kQubitDim; ++l) {
                    auto j = basis.find(l, lower);
                    if (!j) continue;
                    // <l,lower| K a |row,fock>
                    h(*j, i) += g * ket(l, s.row) * amp;
                    // <row,fock| L a^+ |l,lower>
                    h(i, *j) += g * bra(s.row, l) * amp;
                }
            }
        }
    }
    return h;
}

inline ProductBasis fock_basis(const FockTruncation& tr) {
    tr.validate();
    const int cap = tr.total_cap ? *tr.total_cap : tr.n_max * tr.modes;
    const auto occ = detail::enumerate_occupations(tr.modes, tr.n_max, cap, tr.max_dimension / kQubitDim + 1);
    if (occ.size() * kQubitDim > tr.max_dimension)
        throw BudgetError("Fock basis exceeds the configured dimension budget");
    ProductBasis basis;
    for (int l = 0; l < kQubitDim; ++l)
        for (const auto& f : occ) basis.add(l, f);
    return basis;
}

/// Index = row * F + fock position, F = number of kept occupations.
inline Eigen::MatrixXd build_truncated_hamiltonian(const HamiltonianSpec& spec, const FockTruncation& tr) {
    spec.validate();
    if (tr.modes != spec.modes()) throw DimensionError("FockTruncation mode count differs from spec");
    return hamiltonian_on_basis(spec, fock_basis(tr));
}

/// exp(-iHt) through one eigendecomposition, reused for every t.
class ExactPropagator {
public:
    explicit ExactPropagator(const Eigen::MatrixXd& h) {
        if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
            throw DomainError("ExactPropagator: Hamiltonian is not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success) throw Error("ExactPropagator: eigendecomposition failed");
        values_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
    }

    Eigen::Index dimension() const noexcept { return values_.size(); }

    Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi0, double t) const {
        if (psi0.size() != dimension()) throw DimensionError("exact_evolve: state dimension mismatch");
        Eigen::VectorXcd coeff = vectors_.transpose().cast<cplx>() * psi0;
        for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::polar(1.0, -values_(k) * t);
        return vectors_.cast<cplx>() * coeff;
    }

private:
    Eigen::VectorXd values_;
    Eigen::MatrixXd vectors_;
};

inline Eigen::VectorXcd exact_evolve(const Eigen::MatrixXd& h, const Eigen::VectorXcd& psi0, double t) {
    return ExactPropagator(h).evolve(psi0, t);
}

/// rho_ln = sum_f psi(l,f) psi(n,f)^* over a ProductBasis.
inline DensityMatrix4 reduce_product_state(const ProductBasis& basis, const Eigen::VectorXcd& psi) {
    DensityMatrix4 rho = DensityMatrix4::Zero();
    std::map<Occupation, Eigen::Vector4cd> by_fock;
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        auto [it, fresh] = by_fock.try_emplace(basis[i].fock, Eigen::Vector4cd::Zero());
        it->second(basis[i].row) += psi(i);
    }
    for (const auto& [f, v] : by_fock) rho += v * v.adjoint();
    return rho;
}

/// |qubit> (x) |alpha> projected on the basis (the truncated tail is dropped).
inline Eigen::VectorXcd product_state(const ProductBasis& basis, const QubitAmplitudes& qubit,
                                      const CoherentVector& field) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.size());
    const double damp = std::exp(-0.5 * field.squaredNorm());
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        const auto& s = basis[i];
        if (static_cast<Eigen::Index>(s.fock.size()) != field.size())
            throw DimensionError("product_state: field mode count mismatch");
        cplx amp = damp * qubit(s.row);
        for (std::size_t m = 0; m < s.fock.size(); ++m) {
            const int n = s.fock[m];
            amp *= std::pow(field(static_cast<Eigen::Index>(m)), n) / std::sqrt(std::tgamma(n + 1.0));
        }
        psi(i) = amp;
    }
    return psi;
}

/// Trajectory backend on a Fock truncation.
class FockEvolver {
public:
    FockEvolver(const HamiltonianSpec& spec, const FockTruncation& tr, std::vector<double> times)
        : basis_(fock_basis(tr)), h_(hamiltonian_on_basis(spec, basis_)), prop_(h_), times_(std::move(times)) {
        if (tr.modes != spec.modes()) throw DimensionError("FockTruncation mode count differs from spec");
    }

    const std::vector<double>& output_times() const noexcept { return times_; }
    const ProductBasis& basis() const noexcept { return basis_; }
    const Eigen::MatrixXd& hamiltonian() const noexcept { return h_; }

    Trajectory operator()(const QubitAmplitudes& qubit, const CoherentVector& field, std::uint64_t = 0) const {
        const Eigen::VectorXcd psi0 = product_state(basis_, qubit, field);
        Trajectory out;
        for (double t : times_) {
            const Eigen::VectorXcd psi = prop_.evolve(psi0, t);
            TrajectoryPoint p;
            p.t = t;
            p.rho = reduce_product_state(basis_, psi);
            p.norm = psi.squaredNorm();
            p.energy = psi.dot(h_.cast<cplx>() * psi).real();
            out.points.push_back(p);
        }
        out.last_good_time = times_.empty() ? 0.0 : times_.back();
        return out;
    }

private:
    ProductBasis basis_;
    Eigen::MatrixXd h_;
    ExactPropagator prop_;
    std::vector<double> times_;
};

/// Excitation-conserving solver for the rotating-wave Hamiltonian at Delta = 0
/// with the field starting in vacuum.
class RwaSectorSolver {
public:
    RwaSectorSolver(const HamiltonianSpec& spec, std::vector<double> times) : times_(std::move(times)) {
        spec.validate();
        if (spec.variant != Variant::RotatingWave || spec.delta[0] != 0.0 || spec.delta[1] != 0.0)
            throw UnsupportedRegimeError("rwa_sector_solve requires the rotating-wave Hamiltonian with Delta1 = Delta2 = 0");
        const int modes = static_cast<int>(spec.modes());
        for (int e = 0; e <= 2; ++e) {
            ProductBasis basis;
            for (int l = 0; l < kQubitDim; ++l) {
                const int photons = e - QubitBasisIndex(l + 1).ups();
                if (photons < 0) continue;
                for (const auto& f : detail::enumerate_occupations(modes, photons, photons, SIZE_MAX)) {
                    int total = 0;
                    for (int n : f) total += n;
                    if (total == photons) basis.add(l, f);
                }
            }
            const Eigen::MatrixXd h = hamiltonian_on_basis(spec, basis);
            sectors_.push_back(Sector{basis, ExactPropagator(h), h});
        }
    }

    const std::vector<double>& output_times() const noexcept { return times_; }
    Eigen::Index sector_dimension(int excitations) const { return sectors_.at(static_cast<std::size_t>(excitations)).basis.size(); }

    std::vector<DensityMatrix4> solve(const QubitAmplitudes& qubit) const {
        std::vector<DensityMatrix4> out;
        out.reserve(times_.size());
        const Occupation vacuum(static_cast<std::size_t>(modes()), 0);
        std::vector<Eigen::VectorXcd> psi0;
        for (const auto& s : sectors_) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(s.basis.size());
            for (int l = 0; l < kQubitDim; ++l)
                if (auto i = s.basis.find(l, vacuum)) v(*i) = qubit(l);
            psi0.push_back(std::move(v));
        }
        for (double t : times_) {
            // sectors are orthogonal, so the reduced state is a sum of sector
            // contributions plus cross terms sharing the same Fock occupation
            std::map<Occupation, Eigen::Vector4cd> by_fock;
            for (std::size_t e = 0; e < sectors_.size(); ++e) {
                if (psi0[e].squaredNorm() == 0.0) continue;
                const Eigen::VectorXcd psi = sectors_[e].prop.evolve(psi0[e], t);
                for (Eigen::Index i = 0; i < psi.size(); ++i) {
                    const auto& st = sectors_[e].basis[i];
                    auto [it, fresh] = by_fock.try_emplace(st.fock, Eigen::Vector4cd::Zero());
                    it->second(st.row) += psi(i);
                }
            }
            DensityMatrix4 rho = DensityMatrix4::Zero();
            for (const auto& [f, v] : by_fock) rho += v * v.adjoint();
            out.push_back(rho);
        }
        return out;
    }

    /// Backend interface; the field must be the vacuum.
    Trajectory operator()(const QubitAmplitudes& qubit, const CoherentVector& field, std::uint64_t = 0) const {
        if (field.size() != modes() || field.squaredNorm() != 0.0)
            throw UnsupportedRegimeError("rwa_sector_solve supports vacuum field initial states only");
        const auto rhos = solve(qubit);
        Trajectory out;
        for (std::size_t k = 0; k < rhos.size(); ++k) {
            TrajectoryPoint p;
            p.t = times_[k];
            p.rho = rhos[k];
            p.norm = rhos[k].trace().real();
            p.energy = energy(qubit);
            out.points.push_back(p);
        }
        out.last_good_time = times_.empty() ? 0.0 : times_.back();
        return out;
    }

private:
    struct Sector {
        ProductBasis basis;
        ExactPropagator prop;
        Eigen::MatrixXd h;
    };

    Eigen::Index modes() const { return static_cast<Eigen::Index>(sectors_.front().basis[0].fock.size()); }

    // conserved, so evaluate at t = 0
    double energy(const QubitAmplitudes& qubit) const {
        const Occupation vacuum(static_cast<std::size_t>(modes()), 0);
        double e = 0.0;
        for (const auto& s : sectors_) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(s.basis.size());
            for (int l = 0; l < kQubitDim; ++l)
                if (auto i = s.basis.find(l, vacuum)) v(*i) = qubit(l);
            e += v.dot(s.h.cast<cplx>() * v).real();
        }
        return e;
    }

    std::vector<Sector> sectors_;
    std::vector<double> times_;
};

inline std::vector<std::vector<DensityMatrix4>> rwa_sector_solve(const HamiltonianSpec& spec,
                                                                 const std::vector<QubitAmplitudes>& inputs,
                                                                 const std::vector<double>& times) {
    const RwaSectorSolver solver(spec, times);
    std::vector<std::vector<DensityMatrix4>> out;
    for (const auto& q : inputs) out.push_back(solver.solve(q));
    return out;
}

} // namespace mce
