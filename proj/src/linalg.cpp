#include "fluctlab/linalg.hpp"

#include <cmath>
#include <sstream>

#include "fluctlab/util.hpp"

namespace fluctlab {

bool all_finite(const ComplexMatrix& m) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

void require_finite(const ComplexMatrix& m, const char* what) {
    if (m.rows() < 1 || m.cols() < 1)
        throw StructuralError(std::string(what) + ": matrix must be at least 1x1");
    if (!all_finite(m))
        throw StructuralError(std::string(what) + ": matrix has non-finite entries");
}

double hermitian_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw ShapeError("hermitian_defect: matrix is not square");
    return max_abs(m - m.adjoint().eval());
}

HermitianOperator::HermitianOperator(ComplexMatrix m) {
    require_finite(m, "HermitianOperator");
    if (m.rows() != m.cols())
        throw ShapeError("HermitianOperator: matrix is not square (" +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
    const double defect = hermitian_defect(m);
    if (defect > kHermitianDefectTol)
        throw StructuralError("HermitianOperator: defect max|M - M^dagger| = " +
                              format_g17(defect) + " exceeds " + format_g17(kHermitianDefectTol));
    mat_ = 0.5 * (m + m.adjoint().eval());
}

DensityMatrix::DensityMatrix(ComplexMatrix m) {
    require_finite(m, "DensityMatrix");
    if (m.rows() != m.cols()) throw ShapeError("DensityMatrix: matrix is not square");
    const double defect = hermitian_defect(m);
    if (defect > kHermitianDefectTol)
        throw StructuralError("DensityMatrix: Hermitian defect " + format_g17(defect) +
                              " exceeds " + format_g17(kHermitianDefectTol));
    mat_ = 0.5 * (m + m.adjoint().eval());
    const double trace_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
    if (trace_err > 1e-10)
        throw StructuralError("DensityMatrix: |trace - 1| = " + format_g17(trace_err));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(mat_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw SolverError("DensityMatrix: eigenvalue check did not converge");
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -1e-10)
        throw StructuralError("DensityMatrix: smallest eigenvalue " + format_g17(min_eig) +
                              " below -1e-10");
}

Spectrum spectral_decompose(const HermitianOperator& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "spectral_decompose: solver failed to converge on dim " << a.dim();
        throw SolverError(msg.str());
    }
    Spectrum spec{solver.eigenvalues(), solver.eigenvectors()};

    const Index d = a.dim();
    const double ortho = max_abs(
        (spec.eigenvectors.adjoint() * spec.eigenvectors - ComplexMatrix::Identity(d, d)).eval());
    if (ortho > kSpectralTol)
        throw SolverError("spectral_decompose: orthonormality residual " + format_g17(ortho));
    const ComplexMatrix rebuilt =
        spec.eigenvectors * spec.eigenvalues.asDiagonal() * spec.eigenvectors.adjoint();
    const double recon = max_abs((rebuilt - a.matrix()).eval());
    if (recon > kSpectralTol)
        throw SolverError("spectral_decompose: reconstruction residual " + format_g17(recon));
    return spec;
}

HermitianOperator operator_function(const HermitianOperator& a,
                                    const std::function<double(double)>& f) {
    const Spectrum spec = spectral_decompose(a);
    RealVector mapped(spec.dim());
    for (Index i = 0; i < spec.dim(); ++i) {
        const double v = f(spec.eigenvalues(i));
        if (!std::isfinite(v))
            throw RangeError("operator_function: f(" + format_g17(spec.eigenvalues(i)) +
                             ") is not finite");
        mapped(i) = v;
    }
    ComplexMatrix out =
        spec.eigenvectors * mapped.asDiagonal() * spec.eigenvectors.adjoint();
    return HermitianOperator(0.5 * (out + out.adjoint().eval()));
}

ComplexMatrix tensor_product(const ComplexMatrix& x, const ComplexMatrix& y, Index max_dim) {
    const Index rows = x.rows() * y.rows();
    const Index cols = x.cols() * y.cols();
    if (rows > max_dim || cols > max_dim)
        throw SizeError("tensor_product: composite dimension " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " exceeds configured max " +
                        std::to_string(max_dim));
    ComplexMatrix out(rows, cols);
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

Complex hs_inner(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ShapeError("hs_inner: shapes " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + " vs " + std::to_string(y.rows()) + "x" +
                         std::to_string(y.cols()));
    return (x.adjoint() * y).trace();
}

std::string read_file(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw IoError("cannot open for reading: " + path.string());
    std::string out;
    char buf[1 << 14];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, n);
    const bool bad = std::ferror(f);
    std::fclose(f);
    if (bad) throw IoError("read failed: " + path.string());
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + path.string());
    const std::size_t n = std::fwrite(content.data(), 1, content.size(), f);
    const bool bad = (n != content.size()) || std::fclose(f) != 0;
    if (bad) throw IoError("write failed: " + path.string());
}

}  // namespace fluctlab
