#include <gtest/gtest.h>

#include <sstream>

#include "mce/baths.hpp"

using namespace mce;

TEST(LinearBath, Frequencies) {
    const Eigen::VectorXd w = build_linear(10, 0.1);
    ASSERT_EQ(w.size(), 10);
    EXPECT_DOUBLE_EQ(w(0), 0.1);
    EXPECT_DOUBLE_EQ(w(9), 1.0);
    EXPECT_THROW(build_linear(0, 0.1), DomainError);
    EXPECT_THROW(build_linear(3, 0.0), DomainError);
}

TEST(DegenerateBath, EachFrequencyTwice) {
    const Eigen::VectorXd w = build_degenerate_double(5, 0.2);
    ASSERT_EQ(w.size(), 10);
    for (int m = 0; m < 5; ++m) EXPECT_EQ(w(m), w(m + 5));
}

TEST(OhmicBath, TwoModeExample) {
    const Bath b = build_ohmic(2, 0.1, 1.0, 6.0);
    EXPECT_NEAR(b.frequencies(0), std::log(2.0 / (1.0 + std::exp(-6.0))), 1e-14);
    EXPECT_NEAR(b.frequencies(0), 0.690671495422215, 1e-14);
    EXPECT_NEAR(b.frequencies(1), 6.0, 1e-12);
}

TEST(OhmicBath, IdentitiesAndCouplings) {
    for (int m : {1, 10, 50, 100}) {
        const double kondo = 0.09, wc = 2.5, wmax = 12.5;
        const Bath b = build_ohmic(m, kondo, wc, wmax);
        EXPECT_NEAR(b.frequencies(m - 1), wmax, 1e-12);
        for (int k = 1; k < m; ++k) EXPECT_GT(b.frequencies(k), b.frequencies(k - 1));
        for (int k = 0; k < m; ++k) {
            const double w = b.frequencies(k);
            const double g = std::sqrt(w * kondo * wc * (1.0 - std::exp(-wmax / wc)) / (2.0 * m));
            EXPECT_NEAR(b.couplings(k, 0), g, 1e-14);
            EXPECT_EQ(b.couplings(k, 1), b.couplings(k, 0));
        }
    }
}

TEST(OhmicBath, Errors) {
    EXPECT_THROW(build_ohmic(0, 0.1, 1.0, 5.0), DomainError);
    EXPECT_THROW(build_ohmic(4, -0.1, 1.0, 5.0), DomainError);
    EXPECT_THROW(build_ohmic(4, 0.1, 0.0, 5.0), DomainError);
}

TEST(BuildBath, UniformCouplings) {
    BathSpec s;
    s.kind = BathKind::DegenerateDouble;
    s.modes = 3;
    const Bath b = build_bath(s, 1.0, 2.1);
    EXPECT_EQ(b.modes(), 6);
    EXPECT_TRUE((b.couplings.col(1).array() == 2.1).all());
    s.modes = 0;
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(BathFile, RoundTripIsExact) {
    const Bath b = build_ohmic(17, 0.09, 2.5, 12.5);
    std::stringstream ss;
    write_bath(ss, b);
    const Bath r = read_bath(ss);
    EXPECT_EQ(r.frequencies, b.frequencies);
    EXPECT_EQ(r.couplings, b.couplings);
}

TEST(BathFile, FormatAndErrors) {
    Bath b;
    b.frequencies = (Eigen::VectorXd(1) << 0.1).finished();
    b.couplings = (Eigen::MatrixXd(1, 2) << 1.0, 1.9).finished();
    std::stringstream ss;
    write_bath(ss, b);
    EXPECT_EQ(ss.str(), "1 0.10000000000000001 1 1.8999999999999999\n");

    std::istringstream missing("1 0.1 1.0\n");
    EXPECT_THROW(read_bath(missing), ConfigError);
    std::istringstream skipped("1 0.1 1 1\n3 0.2 1 1\n");
    EXPECT_THROW(read_bath(skipped), ConfigError);
    std::istringstream empty("# nothing\n");
    EXPECT_THROW(read_bath(empty), ConfigError);
}
