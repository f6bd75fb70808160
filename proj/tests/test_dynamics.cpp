#include <gtest/gtest.h>

#include <numbers>

#include "mce/baths.hpp"
#include "mce/dynamics.hpp"
#include "mce/oracle.hpp"

using namespace mce;

namespace {

HamiltonianSpec one_mode(Variant v, double w, double g1, double g2, double eps = 0.0, double delta = 0.0) {
    return make_uniform_spec(v, (Eigen::VectorXd(1) << w).finished(), g1, g2, eps, delta, delta);
}

McEState single(const CoherentVector& z, const QubitAmplitudes& q) {
    return McEState({Configuration{z, q, 0.0}});
}

} // namespace

TEST(EhrenfestRhs, FreeOscillatorRotates) {
    const auto spec = one_mode(Variant::SpinBoson, 0.7, 0.0, 0.0);
    CoherentVector z(1);
    z << cplx(1.0, 0.5);
    const CoherentVector r = ehrenfest_rhs(spec, Configuration{z, basis_amplitudes(QubitBasisIndex(1)), 0.0});
    EXPECT_NEAR(std::abs(r(0) - (-I * 0.7 * z(0))), 0.0, 1e-15);
}

TEST(EhrenfestRhs, ConstantForceFromSigmaX) {
    // sigma_x eigenstate on qubit 1 with w = 0: dz/dt = -i g <sx> = -i g
    const auto spec = one_mode(Variant::SpinBoson, 0.0, 0.8, 0.0);
    QubitAmplitudes q = QubitAmplitudes::Zero();
    q(0) = q(2) = 1.0 / std::sqrt(2.0);
    const CoherentVector r = ehrenfest_rhs(spec, Configuration{CoherentVector::Zero(1), q, 0.0});
    EXPECT_NEAR(std::abs(r(0) - cplx(0.0, -0.8)), 0.0, 1e-15);
}

TEST(EhrenfestRhs, DegenerateThrows) {
    const auto spec = one_mode(Variant::SpinBoson, 1.0, 1.0, 1.0);
    EXPECT_THROW(ehrenfest_rhs(spec, Configuration{CoherentVector::Zero(1), QubitAmplitudes::Zero(), 0.0}),
                 DegenerateConfigurationError);
}

TEST(McEKernel, DegenerateColumnsAreFrozen) {
    const auto spec = one_mode(Variant::RotatingWave, 0.3, 1.0, 1.9);
    Eigen::MatrixXcd z(1, 2);
    z << cplx(0.2, 0.1), cplx(-0.4, 0.3);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 4);
    d(0, 2) = 1.0;
    const McEKernel kernel(spec, 1e-10);
    const Eigen::MatrixXcd rates = kernel.center_rates(z, d);
    EXPECT_EQ(rates.col(1).norm(), 0.0);
    EXPECT_GT(rates.col(0).norm(), 0.0);
}

TEST(McEKernel, CenterRatesMatchSingleConfiguration) {
    const auto spec = make_uniform_spec(Variant::SpinBoson, build_linear(3, 0.2), 0.5, 1.1, 0.3, 0.2, 0.4);
    RandomStream rng(21, 0);
    Eigen::MatrixXcd z(3, 4);
    Eigen::MatrixXcd d(4, 4);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.complex_normal(0.5);
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = rng.complex_normal(0.5);
    const McEKernel kernel(spec, 1e-10);
    const Eigen::MatrixXcd rates = kernel.center_rates(z, d);
    for (Eigen::Index j = 0; j < 4; ++j) {
        const CoherentVector one = ehrenfest_rhs(spec, Configuration{z.col(j), d.row(j).transpose(), 0.0});
        EXPECT_LT((rates.col(j) - one).norm(), 1e-13);
    }
}

TEST(AmplitudeRhs, SingleStaticConfigurationIsSchroedinger) {
    // one configuration with zero centre motion: i c' = H~ c
    const auto spec = one_mode(Variant::SpinBoson, 0.0, 0.0, 0.0, 0.4, 0.9);
    QubitAmplitudes q;
    q << cplx(0.5, 0.1), cplx(0.2, -0.3), cplx(-0.4, 0.2), cplx(0.1, 0.6);
    const McEState s = single(CoherentVector::Zero(1), q);
    const Eigen::MatrixXcd cdot =
        amplitude_rhs(spec, s, Eigen::MatrixXcd::Zero(1, 1), Eigen::VectorXd::Zero(1));
    const Eigen::Matrix4cd h = HamiltonianTerms(spec).block(CoherentVector::Zero(1), CoherentVector::Zero(1));
    const Eigen::Vector4cd expect = -I * h * q;
    EXPECT_LT((cdot.row(0).transpose() - expect).norm(), 1e-14);
}

TEST(AmplitudeRhs, PhaseRateCancelsDiagonalEnergy) {
    // with S' = -E the stored amplitude of an eigenstate is stationary
    const auto spec = one_mode(Variant::SpinBoson, 0.0, 0.0, 0.0, 0.7, 0.0);
    const QubitAmplitudes q = basis_amplitudes(QubitBasisIndex(4));
    const McEState s = single(CoherentVector::Zero(1), q);
    Eigen::VectorXd sdot(1);
    sdot << -1.4;
    const Eigen::MatrixXcd ddot = amplitude_rhs(spec, s, Eigen::MatrixXcd::Zero(1, 1), sdot);
    EXPECT_LT(ddot.norm(), 1e-14);
}

TEST(SolveGram, RegularizesDuplicateCenters) {
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(1, 2);
    const Eigen::MatrixXcd omega = gram_matrix(z);
    const Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Ones(2, 1);
    EXPECT_THROW(solve_gram(omega, rhs, 0.0), GramSolveError);
    const GramSolution s = solve_gram(omega, rhs, 1e-8);
    EXPECT_TRUE(s.regularized);
    EXPECT_LT(s.rcond, 1e-8);
    // minimum-norm-like split between the two copies
    EXPECT_NEAR(std::abs(s.x(0, 0) - s.x(1, 0)), 0.0, 1e-7);
    EXPECT_NEAR(s.x(0, 0).real() + s.x(1, 0).real(), 1.0, 1e-6);
}

TEST(SolveGram, WellConditionedIsExact) {
    Eigen::MatrixXcd z(1, 3);
    z << cplx(0, 0), cplx(1.5, 0), cplx(0, 1.5);
    const Eigen::MatrixXcd omega = gram_matrix(z);
    Eigen::MatrixXcd rhs(3, 2);
    rhs << 1, 2, cplx(0, 1), 0, 3, cplx(1, -1);
    const GramSolution s = solve_gram(omega, rhs, 1e-10);
    EXPECT_FALSE(s.regularized);
    EXPECT_LT((omega * s.x - rhs).norm(), 1e-12);
}

TEST(InitGrid, SingleCenterIsExact) {
    GridInit g;
    g.size = 1;
    CoherentVector c(2);
    c << cplx(0.3, -0.2), cplx(0.1, 0.4);
    const auto r = init_grid(g, basis_amplitudes(QubitBasisIndex(2)), c);
    EXPECT_NEAR(r.residual, 0.0, 1e-12);
    EXPECT_EQ(r.state.centers().col(0), c);
    EXPECT_NEAR(state_norm(r.state), 1.0, 1e-14);
}

TEST(InitGrid, GridReproducesVacuumAndIsDeterministic) {
    GridInit g;
    g.size = 25;
    g.comp = 2.0;
    g.seed = 5;
    const QubitAmplitudes q = basis_amplitudes(QubitBasisIndex(3));
    const auto a = init_grid(g, q, CoherentVector::Zero(2));
    const auto b = init_grid(g, q, CoherentVector::Zero(2));
    EXPECT_EQ(a.state.centers(), b.state.centers());
    EXPECT_LT(a.residual, 1e-3);
    EXPECT_NEAR(state_norm(a.state), 1.0, 1e-12);
    const auto c = init_grid(g, q, CoherentVector::Zero(2), 1);
    EXPECT_NE(a.state.centers(), c.state.centers());
}

TEST(InitGrid, ConjugatePairs) {
    GridInit g;
    g.size = 7;
    g.comp = 1.5;
    g.conjugate_pairs = true;
    CoherentVector c(1);
    c << cplx(0.5, 0.0);
    const auto r = init_grid(g, basis_amplitudes(QubitBasisIndex(1)), c);
    for (int j = 0; j + 1 < 6; j += 2) {
        const cplx a = r.state.centers()(0, j) - c(0), b = r.state.centers()(0, j + 1) - c(0);
        EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-15);
    }
}

TEST(InitGrid, Errors) {
    GridInit g;
    g.size = 4;
    g.comp = 1e9;  // all centres collapse onto one point
    const QubitAmplitudes q = basis_amplitudes(QubitBasisIndex(1));
    EXPECT_THROW(init_grid(g, q, CoherentVector::Zero(1), 0, 0.0), InitError);
    EXPECT_THROW(init_grid(g, 2.0 * q, CoherentVector::Zero(1)), DomainError);
    g.size = 0;
    EXPECT_THROW(init_grid(g, q, CoherentVector::Zero(1)), ConfigError);
}

TEST(Propagation, FreeOscillatorPeriodicity) {
    const double w = 0.9;
    const auto spec = one_mode(Variant::RotatingWave, w, 0.0, 0.0);
    CoherentVector z0(1);
    z0 << cplx(1.2, -0.3);
    IntegratorConfig ic;
    const double period = 2.0 * std::numbers::pi / w;
    ic.dt = period / 1000.0;
    McEState s = single(z0, basis_amplitudes(QubitBasisIndex(1)));
    const McEPropagator prop(spec, ic);
    for (int k = 0; k < 1000; ++k) s = prop.step(s);
    EXPECT_LT(std::abs(s.centers()(0, 0) - z0(0)), 1e-8);
    EXPECT_NEAR(state_norm(s), 1.0, 1e-12);
}

TEST(Propagation, MatchesFockOracleSingleMode) {
    const auto spec = one_mode(Variant::RotatingWave, 0.1, 1.0, 1.9);
    GridInit g;
    g.size = 25;
    g.comp = 2.0;
    g.seed = 1;
    IntegratorConfig ic;
    TimeGrid tg{1.5, 50};
    const McEEvolver ev(spec, g, ic, tg);
    FockTruncation tr;
    tr.n_max = 6;
    const FockEvolver oracle(spec, tr, ev.output_times());
    QubitAmplitudes q = QubitAmplitudes::Constant(0.5);
    const auto a = ev(q, CoherentVector::Zero(1), 0);
    const auto b = oracle(q, CoherentVector::Zero(1));
    ASSERT_FALSE(a.failed);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        EXPECT_LT((a.points[k].rho - b.points[k].rho).cwiseAbs().maxCoeff(), 2e-4) << "t=" << a.points[k].t;
        EXPECT_NEAR(a.points[k].norm, 1.0, 1e-4);
    }
}

TEST(Propagation, Rk45AgreesWithRk4) {
    const auto spec = make_uniform_spec(Variant::SpinBoson, build_linear(2, 0.3), 1.0, 1.0, 0.5, 0.5, 0.5);
    GridInit g;
    g.size = 6;
    g.comp = 2.0;
    const auto init = init_grid(g, basis_amplitudes(QubitBasisIndex(1)), CoherentVector::Zero(2));
    IntegratorConfig rk4;
    rk4.dt = 0.005;
    IntegratorConfig rk45 = rk4;
    rk45.method = IntegratorMethod::RK45;
    rk45.abs_tol = rk45.rel_tol = 1e-10;
    const auto a = McEPropagator(spec, rk4).propagate(init.state, TimeGrid{0.5, 100});
    const auto b = McEPropagator(spec, rk45).propagate(init.state, TimeGrid{0.5, 100});
    ASSERT_EQ(a.points.size(), b.points.size());
    EXPECT_LT((a.points.back().rho - b.points.back().rho).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Diagnostics, SingleConfigurationEnergy) {
    const auto spec = make_uniform_spec(Variant::SpinBoson, build_linear(2, 0.5), 0.7, 0.2, 0.3, 0.1, 0.6);
    CoherentVector z(2);
    z << cplx(0.4, 0.1), cplx(-0.2, 0.3);
    QubitAmplitudes q;
    q << cplx(0.5, 0), cplx(0.5, 0), cplx(0, 0.5), cplx(0.5, 0);
    const Diagnostics d = diagnostics(spec, single(z, q));
    EXPECT_NEAR(d.norm, 1.0, 1e-14);
    EXPECT_NEAR(d.energy, mean_field_energy(spec, Configuration{z, q, 0.0}), 1e-13);
}

TEST(DetectDivergence, ReportsFirstViolation) {
    std::vector<TrajectoryPoint> pts(5);
    for (int k = 0; k < 5; ++k) {
        pts[k].t = 0.1 * k;
        pts[k].norm = 1.0;
        pts[k].energy = 2.0;
    }
    pts[3].energy = 2.05;
    auto r = detect_divergence(pts, 0.01);
    EXPECT_TRUE(r.diverged);
    EXPECT_DOUBLE_EQ(r.time, 0.30000000000000004);
    pts[3].energy = 2.0;
    pts[2].norm = NAN;
    r = detect_divergence(pts, 0.01);
    EXPECT_TRUE(r.diverged);
    EXPECT_DOUBLE_EQ(r.time, 0.2);
    pts[2].norm = 1.005;
    r = detect_divergence(pts, 0.01);
    EXPECT_FALSE(r.diverged);
    EXPECT_NEAR(r.max_norm_error, 0.005, 1e-15);
}

TEST(TimeGrid, OutputTimes) {
    TimeGrid tg{1.0, 25};
    const auto t = tg.output_times(0.01);
    ASSERT_EQ(t.size(), 5u);
    EXPECT_DOUBLE_EQ(t.back(), 1.0);
    EXPECT_THROW((TimeGrid{0.0, 1}.validate()), ConfigError);
}

TEST(IntegratorConfig, Validation) {
    IntegratorConfig ic;
    ic.gram_reg = 1e-2;
    EXPECT_THROW(ic.validate(), ConfigError);
    ic.gram_reg = 1e-10;
    ic.dt = 0.0;
    EXPECT_THROW(ic.validate(), ConfigError);
}
