#include "ksn/linalg.hpp"

#include <Eigen/SVD>

namespace ksn {

Matrix pseudo_inverse(const Matrix& M, double rcond) {
    if (!M.allFinite())
        throw std::invalid_argument("pseudo_inverse: matrix must be finite");
    if (!(rcond > 0.0 && rcond < 1.0))
        throw std::invalid_argument("pseudo_inverse: rcond must be in (0,1)");
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double cutoff = sigma.size() > 0 ? rcond * sigma(0) : 0.0;
    Vector inv_sigma = Vector::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > cutoff)
            inv_sigma(i) = 1.0 / sigma(i);
    return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

double spectral_norm(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double nuclear_norm(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues().sum();
}

double matrix_norm(const Matrix& M, MatrixNormChoice choice) {
    return choice == MatrixNormChoice::spectral ? spectral_norm(M)
                                                : nuclear_norm(M);
}

} // namespace ksn
