#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <stdexcept>

namespace rbfvar::tsvd {

/// Truncated SVD of a square matrix: only the singular triplets with
/// sigma_k > tau * sigma_1 (strict) are retained.
struct TsvdFactors {
    Eigen::MatrixXd U_p;     // N x p
    Eigen::VectorXd sigma;   // p, descending
    Eigen::MatrixXd V_p;     // N x p
    double sigma1 = 0.0;     // largest singular value of the input
    double tau = 0.0;
    Eigen::Index rank_kept = 0;
};

inline TsvdFactors tsvd_factorize(const Eigen::MatrixXd& A, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tsvd_factorize: tau must lie in (0,1)");
    if (!A.allFinite()) throw std::runtime_error("tsvd_factorize: non-finite entries");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();

    TsvdFactors out;
    out.tau = tau;
    out.sigma1 = s.size() > 0 ? s(0) : 0.0;
    Eigen::Index p = 0;
    while (p < s.size() && s(p) > tau * out.sigma1) ++p;
    if (out.sigma1 == 0.0) p = 0;  // zero matrix keeps nothing
    out.rank_kept = p;
    out.U_p = svd.matrixU().leftCols(p);
    out.V_p = svd.matrixV().leftCols(p);
    out.sigma = s.head(p);
    return out;
}

/// Applies the truncated pseudo-inverse: V_p diag(1/sigma) U_p^T b.
inline Eigen::VectorXd tsvd_apply(const TsvdFactors& f, const Eigen::VectorXd& b) {
    if (b.size() != f.U_p.rows() && f.rank_kept > 0)
        throw std::invalid_argument("tsvd_apply: length mismatch");
    if (f.rank_kept == 0) return Eigen::VectorXd::Zero(b.size());
    return f.V_p * (f.U_p.transpose() * b).cwiseQuotient(f.sigma);
}

/// Ratio of the largest to the smallest retained singular value.
inline double effective_condition(const TsvdFactors& f) {
    if (f.rank_kept < 1) throw std::invalid_argument("effective_condition: empty factorization");
    return f.sigma1 / f.sigma(f.rank_kept - 1);
}

}  // namespace rbfvar::tsvd
