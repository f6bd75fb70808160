#pragma once

// Mode sets: linear spectra, doubly degenerate spectra and discretized
// Ohmic baths J(w) = (2/pi) alpha w exp(-w/w_c).

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mce/errors.hpp"

namespace mce {

enum class BathKind { Linear, DegenerateDouble, Ohmic };

struct BathSpec {
    BathKind kind = BathKind::Linear;
    int modes = 1;  // M (for DegenerateDouble: M_half)
    double spacing = 0.1;
    double kondo = 0.09;
    double omega_c = 2.5;
    double omega_max = 12.5;

    void validate() const {
        if (modes < 1) throw ConfigError("bath.M must be >= 1");
        if (kind == BathKind::Ohmic) {
            if (!(kondo > 0.0) || !(omega_c > 0.0) || !(omega_max > 0.0))
                throw ConfigError("ohmic bath needs kondo, omega_c, omega_max > 0");
        } else if (!(spacing > 0.0)) {
            throw ConfigError("bath.spacing must be > 0");
        }
    }
};

/// Frequencies and per-qubit couplings, M x 2.
struct Bath {
    Eigen::VectorXd frequencies;
    Eigen::MatrixXd couplings;

    Eigen::Index modes() const noexcept { return frequencies.size(); }
};

inline Eigen::VectorXd build_linear(int modes, double spacing) {
    if (modes < 1) throw DomainError("build_linear: M must be >= 1");
    if (!(spacing > 0.0)) throw DomainError("build_linear: spacing must be > 0");
    Eigen::VectorXd w(modes);
    for (int m = 1; m <= modes; ++m) w(m - 1) = spacing * m;
    return w;
}

inline Eigen::VectorXd build_degenerate_double(int modes_half, double spacing) {
    if (modes_half < 1) throw DomainError("build_degenerate_double: M_half must be >= 1");
    const Eigen::VectorXd half = build_linear(modes_half, spacing);
    Eigen::VectorXd w(2 * modes_half);
    w << half, half;
    return w;
}

/// Logarithmic discretization; the last mode lands on omega_max.
inline Bath build_ohmic(int modes, double kondo, double omega_c, double omega_max) {
    if (modes < 1) throw DomainError("build_ohmic: M must be >= 1");
    if (!(kondo > 0.0) || !(omega_c > 0.0) || !(omega_max > 0.0))
        throw DomainError("build_ohmic: kondo, omega_c and omega_max must be > 0");
    const double span = -std::expm1(-omega_max / omega_c);  // 1 - exp(-w_max/w_c)
    Bath b;
    b.frequencies.resize(modes);
    b.couplings.resize(modes, 2);
    for (int m = 1; m <= modes; ++m) {
        const double arg = 1.0 - m * span / modes;
        if (!(arg > 0.0)) throw DomainError("build_ohmic: logarithm argument <= 0");
        const double w = -omega_c * std::log(arg);
        b.frequencies(m - 1) = w;
        const double g = std::sqrt(w * kondo * omega_c * span / (2.0 * modes));
        b.couplings(m - 1, 0) = g;
        b.couplings(m - 1, 1) = g;
    }
    return b;
}

inline Bath build_bath(const BathSpec& spec, double g1, double g2) {
    Bath b;
    switch (spec.kind) {
    case BathKind::Ohmic: return build_ohmic(spec.modes, spec.kondo, spec.omega_c, spec.omega_max);
    case BathKind::Linear: b.frequencies = build_linear(spec.modes, spec.spacing); break;
    case BathKind::DegenerateDouble: b.frequencies = build_degenerate_double(spec.modes, spec.spacing); break;
    }
    b.couplings.resize(b.frequencies.size(), 2);
    b.couplings.col(0).setConstant(g1);
    b.couplings.col(1).setConstant(g2);
    return b;
}

/// One line per mode: "m omega g1 g2" with 17 significant digits, m 1-based.
inline void write_bath(std::ostream& os, const Bath& bath) {
    char buf[128];
    for (Eigen::Index m = 0; m < bath.modes(); ++m) {
        std::snprintf(buf, sizeof buf, "%ld %.17g %.17g %.17g\n", static_cast<long>(m + 1), bath.frequencies(m),
                      bath.couplings(m, 0), bath.couplings(m, 1));
        os << buf;
    }
}

inline Bath read_bath(std::istream& is) {
    std::vector<double> w, g1, g2;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long m;
        double a, b, c;
        if (!(ls >> m >> a >> b >> c))
            throw ConfigError("bath file line " + std::to_string(lineno) + ": expected 'm omega g1 g2'");
        if (m != static_cast<long>(w.size()) + 1)
            throw ConfigError("bath file line " + std::to_string(lineno) + ": mode index out of sequence");
        w.push_back(a);
        g1.push_back(b);
        g2.push_back(c);
    }
    if (w.empty()) throw ConfigError("bath file contains no modes");
    Bath bath;
    const auto n = static_cast<Eigen::Index>(w.size());
    bath.frequencies = Eigen::Map<Eigen::VectorXd>(w.data(), n);
    bath.couplings.resize(n, 2);
    bath.couplings.col(0) = Eigen::Map<Eigen::VectorXd>(g1.data(), n);
    bath.couplings.col(1) = Eigen::Map<Eigen::VectorXd>(g2.data(), n);
    return bath;
}

} // namespace mce
