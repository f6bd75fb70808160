#include <gtest/gtest.h>

#include "mce/baths.hpp"
#include "mce/channels.hpp"
#include "mce/oracle.hpp"

using namespace mce;

namespace {

std::vector<double> linspace(double t_max, int n) {
    std::vector<double> t;
    for (int k = 0; k <= n; ++k) t.push_back(t_max * k / n);
    return t;
}

} // namespace

TEST(FockBasis, DimensionAndBudget) {
    FockTruncation tr;
    tr.n_max = 3;
    tr.modes = 2;
    EXPECT_EQ(fock_basis(tr).size(), 4 * 16);
    tr.total_cap = 2;
    EXPECT_EQ(fock_basis(tr).size(), 4 * 6);
    tr.total_cap.reset();
    tr.n_max = 10;
    tr.modes = 6;
    EXPECT_THROW(fock_basis(tr), BudgetError);
    tr.n_max = 0;
    EXPECT_THROW(fock_basis(tr), ConfigError);
}

TEST(Hamiltonian, SymmetricOnBasis) {
    for (auto v : {Variant::SpinBoson, Variant::RotatingWave}) {
        const auto spec = make_uniform_spec(v, build_linear(2, 0.4), 0.6, 1.3, 0.2, 0.5, 0.1);
        FockTruncation tr;
        tr.n_max = 3;
        tr.modes = 2;
        const Eigen::MatrixXd h = build_truncated_hamiltonian(spec, tr);
        EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Hamiltonian, JaynesCummingsDoublet) {
    // one qubit effectively (g2 = 0, eps = 0): |up dn,0> <-> |dn dn,1> splits by 2g
    const auto spec = make_uniform_spec(Variant::RotatingWave, (Eigen::VectorXd(1) << 0.0).finished(), 0.8, 0.0);
    FockTruncation tr;
    tr.n_max = 1;
    const Eigen::MatrixXd h = build_truncated_hamiltonian(spec, tr);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    EXPECT_NEAR(es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff(), 1.6, 1e-14);
}

TEST(ExactPropagator, RabiOscillation) {
    const double g = 0.8;
    const auto spec = make_uniform_spec(Variant::RotatingWave, (Eigen::VectorXd(1) << 0.0).finished(), g, 0.0);
    FockTruncation tr;
    tr.n_max = 4;
    const auto times = linspace(3.0, 30);
    const FockEvolver ev(spec, tr, times);
    const auto traj = ev(basis_amplitudes(QubitBasisIndex(3)), CoherentVector::Zero(1));
    for (const auto& p : traj.points) {
        EXPECT_NEAR(p.rho(2, 2).real(), std::pow(std::cos(g * p.t), 2), 1e-12);
        EXPECT_NEAR(p.norm, 1.0, 1e-12);
    }
}

TEST(SectorSolver, AgreesWithFockOracle) {
    const auto spec = make_uniform_spec(Variant::RotatingWave, build_linear(3, 0.1), 1.0, 1.9, 0.3);
    const auto times = linspace(4.0, 40);
    FockTruncation tr;
    tr.n_max = 2;
    tr.modes = 3;
    const FockEvolver fock(spec, tr, times);
    const RwaSectorSolver sector(spec, times);
    const auto inputs = tomography_inputs(Tomography::Full);
    for (const auto& in : inputs) {
        const auto a = fock(in.amplitudes, CoherentVector::Zero(3));
        const auto b = sector(in.amplitudes, CoherentVector::Zero(3));
        for (std::size_t k = 0; k < times.size(); ++k)
            EXPECT_LT((a.points[k].rho - b.points[k].rho).cwiseAbs().maxCoeff(), 1e-8) << in.label;
        EXPECT_NEAR(a.points.back().energy, b.points.back().energy, 1e-10);
    }
}

TEST(SectorSolver, SectorDimensions) {
    const auto spec = make_uniform_spec(Variant::RotatingWave, build_linear(10, 0.1), 1.0, 2.1);
    const RwaSectorSolver s(spec, {0.0});
    EXPECT_EQ(s.sector_dimension(0), 1);
    EXPECT_EQ(s.sector_dimension(1), 2 + 10);
    // |up up>, one up + one photon (2 x 10), two photons (10 + 45)
    EXPECT_EQ(s.sector_dimension(2), 1 + 20 + 55);
}

TEST(SectorSolver, RejectsUnsupportedRegimes) {
    auto spec = make_uniform_spec(Variant::RotatingWave, build_linear(2, 0.1), 1.0, 1.0, 0.0, 0.3, 0.0);
    EXPECT_THROW(RwaSectorSolver(spec, {0.0}), UnsupportedRegimeError);
    spec.delta = {0.0, 0.0};
    spec.variant = Variant::SpinBoson;
    EXPECT_THROW(RwaSectorSolver(spec, {0.0}), UnsupportedRegimeError);
    spec.variant = Variant::RotatingWave;
    const RwaSectorSolver ok(spec, {0.0});
    CoherentVector field(2);
    field << 0.1, 0.0;
    EXPECT_THROW(ok(basis_amplitudes(QubitBasisIndex(1)), field), UnsupportedRegimeError);
}

TEST(FockEvolver, TruncationConverges) {
    // spin-boson, one mode: n_max = 16 and 22 agree where 3 does not
    const auto spec = make_uniform_spec(Variant::SpinBoson, (Eigen::VectorXd(1) << 1.0).finished(), 0.5, 0.5, 1.0,
                                        1.0, 1.0);
    const auto times = linspace(2.5, 5);
    auto run = [&](int n) {
        FockTruncation tr;
        tr.n_max = n;
        return FockEvolver(spec, tr, times)(basis_amplitudes(QubitBasisIndex(1)), CoherentVector::Zero(1));
    };
    const auto lo = run(3), mid = run(16), hi = run(22);
    const double coarse = (lo.points.back().rho - hi.points.back().rho).cwiseAbs().maxCoeff();
    const double fine = (mid.points.back().rho - hi.points.back().rho).cwiseAbs().maxCoeff();
    EXPECT_LT(fine, 1e-6);
    EXPECT_GT(coarse, fine);
}

TEST(ProductState, CoherentFieldNormalization) {
    FockTruncation tr;
    tr.n_max = 20;
    const ProductBasis basis = fock_basis(tr);
    CoherentVector a(1);
    a << cplx(0.8, -0.6);
    const Eigen::VectorXcd psi = product_state(basis, basis_amplitudes(QubitBasisIndex(2)), a);
    EXPECT_NEAR(psi.squaredNorm(), 1.0, 1e-12);
    const DensityMatrix4 rho = reduce_product_state(basis, psi);
    EXPECT_NEAR(rho(1, 1).real(), 1.0, 1e-12);
}
