#pragma once

#include "ksn/types.hpp"

namespace ksn {

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// rcond * sigma_max are treated as zero.
Matrix pseudo_inverse(const Matrix& M, double rcond = 1e-10);

/// Largest singular value.
double spectral_norm(const Matrix& M);

/// Sum of singular values.
double nuclear_norm(const Matrix& M);

/// Which norm ||X|| means in step sizes and theory constants. The spectral
/// norm is the smoothness constant that makes the dual step safe; the nuclear
/// norm is never smaller, so both are stable choices.
enum class MatrixNormChoice { spectral, nuclear };

double matrix_norm(const Matrix& M, MatrixNormChoice choice);

} // namespace ksn
