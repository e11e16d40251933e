#ifndef FLUCTLAB_LINALG_HPP
#define FLUCTLAB_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "fluctlab/errors.hpp"

namespace fluctlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical tolerances shared across the toolkit.  The eigen-solver is held
// to 1e-10; downstream identity checks default to 1e-9 to leave headroom.
inline constexpr double kHermitianDefectTol = 1e-12;
inline constexpr double kSpectralTol = 1e-10;
inline constexpr double kDefaultTol = 1e-9;
inline constexpr Index kMaxCompositeDim = 256;

// Max entrywise modulus.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m);
void require_finite(const ComplexMatrix& m, const char* what);

// max |M - M^dagger| entrywise.
double hermitian_defect(const ComplexMatrix& m);

//=========================================================================
// HermitianOperator
//=========================================================================

// A square operator symmetrized at construction: A <- (A + A^dagger)/2 when
// the defect is at most 1e-12, rejected otherwise.  The symmetrization
// guards against accumulation from long tensor/compose chains.
class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix m);

    Index dim() const { return mat_.rows(); }
    const ComplexMatrix& matrix() const { return mat_; }

private:
    ComplexMatrix mat_;
};

//=========================================================================
// Spectrum
//=========================================================================

// Eigenvalues ascending and repeated per multiplicity; eigenvectors(:, i)
// belongs to eigenvalues(i).  Within a degenerate block the eigenvectors
// are an arbitrary orthonormal choice, so per-vector quantities are only
// unique up to rotations inside such blocks.
struct Spectrum {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    Index dim() const { return eigenvalues.size(); }
};

//=========================================================================
// DensityMatrix
//=========================================================================

// A state: Hermitian within 1e-12, unit trace within 1e-10, smallest
// eigenvalue >= -1e-10.  All three are enforced at construction.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m);

    Index dim() const { return mat_.rows(); }
    const ComplexMatrix& matrix() const { return mat_; }

private:
    ComplexMatrix mat_;
};

//=========================================================================
// Operations
//=========================================================================

// Hermitian eigendecomposition with eigenvalues ascending.  Orthonormality
// and reconstruction are verified to 1e-10; failure raises SolverError with
// the offending residual.
Spectrum spectral_decompose(const HermitianOperator& a);

// f applied on the spectrum: sum_i f(a_i) |a_i><a_i|.  A non-finite f value
// raises RangeError naming the offending eigenvalue.
HermitianOperator operator_function(const HermitianOperator& a,
                                    const std::function<double(double)>& f);

// Kronecker product, composite row index = i_X * rows(Y) + i_Y (X-major).
// Composite dimensions beyond max_dim raise SizeError.
ComplexMatrix tensor_product(const ComplexMatrix& x, const ComplexMatrix& y,
                             Index max_dim = kMaxCompositeDim);

// Tr(X^dagger Y).
Complex hs_inner(const ComplexMatrix& x, const ComplexMatrix& y);

}  // namespace fluctlab

#endif
