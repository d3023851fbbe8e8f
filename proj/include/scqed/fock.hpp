#pragma once

// Truncated bosonic mode: ladder operators, displacement operators and
// displaced-Fock matrix elements.
//
// Operator identities that hold on the infinite Fock space are only trusted
// on the leading (dim - buffer) block of the truncation; everything above
// that is treated as cutoff artifact.

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace scqed {

struct FockTruncation {
    int dim = 2;     // Fock levels retained
    int buffer = 0;  // top levels excluded from identity checks

    void validate() const {
        if (dim < 2) throw std::invalid_argument("FockTruncation: dim must be >= 2");
        if (buffer < 0 || buffer >= dim)
            throw std::invalid_argument("FockTruncation: buffer must satisfy 0 <= buffer < dim");
    }
    // number of levels on which identities are asserted
    int trusted() const { return dim - buffer; }
};

inline Eigen::MatrixXd annihilation(int dim) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

inline Eigen::MatrixXd creation(int dim) { return annihilation(dim).transpose(); }

inline Eigen::MatrixXd number_operator(int dim) {
    Eigen::VectorXd n = Eigen::VectorXd::LinSpaced(dim, 0.0, double(dim - 1));
    return n.asDiagonal();
}

struct LadderOperators {
    Eigen::MatrixXd a, a_dagger, n;
};

inline LadderOperators ladder_operators(const FockTruncation& trunc) {
    trunc.validate();
    return {annihilation(trunc.dim), creation(trunc.dim), number_operator(trunc.dim)};
}

// Soundness rule for trusting displaced matrix elements at Fock level n_max:
// a displacement by theta shifts weight by ~theta^2 quanta, so we require
// theta^2 * (n_max + 1) <= dim / 4.
inline bool displacement_trusted(const FockTruncation& trunc, double theta, int n_max) {
    return theta * theta * (n_max + 1) <= trunc.dim / 4.0;
}

/// e^{theta (a^dag - a)} on the truncated space. Real orthogonal since the
/// generator is antisymmetric. Throws when theta^2 exceeds the configured
/// fraction of dim (the truncation cannot represent the displaced states).
inline Eigen::MatrixXd displacement(const FockTruncation& trunc, double theta,
                                    double max_dim_fraction = 0.25) {
    trunc.validate();
    if (theta * theta > max_dim_fraction * trunc.dim)
        throw std::domain_error("displacement: theta^2 = " + std::to_string(theta * theta) +
                                " exceeds " + std::to_string(max_dim_fraction) +
                                " * dim; truncation unsound");
    Eigen::MatrixXd gen = theta * (creation(trunc.dim) - annihilation(trunc.dim));
    return gen.exp();
}

/// Laguerre polynomial L_n(y) by the stable three-term recurrence.
inline double laguerre(int n, double y) {
    if (n < 0) throw std::invalid_argument("laguerre: n must be >= 0");
    if (n == 0) return 1.0;
    double lkm1 = 1.0, lk = 1.0 - y;
    for (int k = 1; k < n; ++k) {
        double lkp1 = ((2.0 * k + 1.0 - y) * lk - k * lkm1) / (k + 1.0);
        lkm1 = lk;
        lk = lkp1;
    }
    return lk;
}

/// <n| e^{x (a^dag - a)} |n> = e^{-x^2/2} L_n(x^2); even in x.
inline double displaced_diag_element(int n, double x) {
    double y = x * x;
    return std::exp(-0.5 * y) * laguerre(n, y);
}

}  // namespace scqed
