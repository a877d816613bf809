#ifndef SECBEAM_LINALG_HPP
#define SECBEAM_LINALG_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace secbeam {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Real part of tr(A B).  Both operands are assumed square and of equal size.
inline double trace_product(const CMat& a, const CMat& b)
{
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            acc += (a(i, j) * b(j, i)).real();
    return acc;
}

inline CMat outer(const CVec& v)
{
    return v * v.adjoint();
}

inline CMat hermitian_part(const CMat& x)
{
    return 0.5 * (x + x.adjoint());
}

inline double min_eigenvalue(const CMat& x)
{
    if (x.rows() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(x), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// Symmetrizes `x` and checks it is PSD within -1e-8*(1+|tr x|).
/// Throws std::invalid_argument naming `what` otherwise.
inline CMat checked_psd(const CMat& x, const char* what)
{
    if (x.rows() != x.cols())
        throw std::invalid_argument(std::string(what) + ": matrix is not square");
    if (!x.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
    CMat h = hermitian_part(x);
    double tol = 1e-8 * (1.0 + std::abs(h.trace().real()));
    if (min_eigenvalue(h) < -tol)
        throw std::invalid_argument(std::string(what) + ": matrix is not positive semidefinite");
    return h;
}

/// Orthonormal basis (M x (M-1)) of the orthogonal complement of a nonzero vector.
inline CMat orthogonal_complement(const CVec& v)
{
    const Eigen::Index m = v.size();
    const CMat col = v;
    Eigen::HouseholderQR<CMat> qr(col);
    CMat q = qr.householderQ() * CMat::Identity(m, m);
    return q.rightCols(m - 1);
}

} // namespace secbeam

#endif // SECBEAM_LINALG_HPP
