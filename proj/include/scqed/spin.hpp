#pragma once

// Pauli tensor operators, the sigma_1 eigenbasis and Walsh-Hadamard products
// for m two-level atoms.
//
// Label convention: lambda_j = +1 maps to bit 0 and lambda_j = -1 to bit 1,
// so labels enumerate in binary order (+1,+1,...), (+1,...,-1), ...; this is
// the one fixed ordering shared by every module.

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace scqed {

inline constexpr int kMaxAtoms = 6;  // dense tensor cap

struct SpinLabel {
    std::vector<int> lambdas;  // entries in {+1,-1}

    explicit SpinLabel(std::vector<int> ls) : lambdas(std::move(ls)) {
        for (int l : lambdas)
            if (l != 1 && l != -1) throw std::invalid_argument("SpinLabel: entries must be +-1");
    }

    int atoms() const { return int(lambdas.size()); }

    // Lambda(lambda) = sum_j lambda_j
    int Lambda() const {
        int s = 0;
        for (int l : lambdas) s += l;
        return s;
    }

    // flip one atom: Lambda(flip(lambda,j)) = Lambda(lambda) - 2 lambda_j
    SpinLabel flipped(int site) const {
        if (site < 1 || site > atoms()) throw std::out_of_range("SpinLabel::flipped: site");
        SpinLabel out = *this;
        out.lambdas[site - 1] = -out.lambdas[site - 1];
        return out;
    }

    // binary order index, +1 -> bit 0
    int index() const {
        int idx = 0;
        for (int l : lambdas) idx = 2 * idx + (l == 1 ? 0 : 1);
        return idx;
    }

    static SpinLabel from_index(int m, int idx) {
        if (m < 1 || m > kMaxAtoms) throw std::invalid_argument("SpinLabel: bad atom count");
        if (idx < 0 || idx >= (1 << m)) throw std::out_of_range("SpinLabel::from_index");
        std::vector<int> ls(m);
        for (int j = 0; j < m; ++j) ls[j] = ((idx >> (m - 1 - j)) & 1) ? -1 : 1;
        return SpinLabel(std::move(ls));
    }

    bool operator==(const SpinLabel& o) const { return lambdas == o.lambdas; }
};

inline Eigen::Matrix2d pauli(int axis) {
    Eigen::Matrix2d s;
    if (axis == 1)
        s << 0, 1, 1, 0;
    else if (axis == 3)
        s << 1, 0, 0, -1;
    else
        throw std::invalid_argument("pauli: axis must be 1 or 3 (sigma_2 is not used here)");
    return s;
}

/// sigma_k acting on atom `site` (1-based) of an m-atom register.
inline Eigen::MatrixXd pauli_embedded(int m, int axis, int site) {
    if (m < 1 || m > kMaxAtoms) throw std::invalid_argument("pauli_embedded: bad atom count");
    if (site < 1 || site > m) throw std::out_of_range("pauli_embedded: site out of range");
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    for (int j = 1; j <= m; ++j) {
        Eigen::MatrixXd f = (j == site) ? Eigen::MatrixXd(pauli(axis))
                                        : Eigen::MatrixXd(Eigen::Matrix2d::Identity());
        Eigen::MatrixXd next(out.rows() * 2, out.cols() * 2);
        for (int r = 0; r < out.rows(); ++r)
            for (int c = 0; c < out.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = out(r, c) * f;
        out = std::move(next);
    }
    return out;
}

/// W^{tensor m}, W = (1/sqrt2)(1 1; 1 -1); symmetric, self-inverse, and
/// W sigma_1 W = sigma_3 on every site.
inline Eigen::MatrixXd walsh_hadamard(int m) {
    if (m < 1 || m > kMaxAtoms) throw std::invalid_argument("walsh_hadamard: bad atom count");
    Eigen::Matrix2d w;
    w << 1, 1, 1, -1;
    w /= std::sqrt(2.0);
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    for (int j = 0; j < m; ++j) {
        Eigen::MatrixXd next(out.rows() * 2, out.cols() * 2);
        for (int r = 0; r < out.rows(); ++r)
            for (int c = 0; c < out.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = out(r, c) * w;
        out = std::move(next);
    }
    return out;
}

/// |lambda> = tensor_j (1, lambda_j)/sqrt2; sigma_1^{(j)} eigenvector with
/// eigenvalue lambda_j on every site.
inline Eigen::VectorXd lambda_vector(const SpinLabel& label) {
    const int m = label.atoms();
    if (m < 1 || m > kMaxAtoms) throw std::invalid_argument("lambda_vector: bad atom count");
    Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
    for (int j = 0; j < m; ++j) {
        Eigen::Vector2d f(1.0, double(label.lambdas[j]));
        f /= std::sqrt(2.0);
        Eigen::VectorXd next(v.size() * 2);
        for (int i = 0; i < v.size(); ++i) next.segment(2 * i, 2) = v(i) * f;
        v = std::move(next);
    }
    return v;
}

}  // namespace scqed
