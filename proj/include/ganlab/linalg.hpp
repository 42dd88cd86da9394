#pragma once

#include <cstddef>
#include <vector>

namespace ganlab {

using Vector = std::vector<double>;

/// Dense row-major matrix. Networks here are tiny (a few hundred entries at
/// most), so there is no sparse storage; nonzero counts are metadata only.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  // row-major, length rows*cols

    Matrix() = default;
    Matrix(int r, int c);                            // zero-filled
    Matrix(int r, int c, std::vector<double> vals);  // validates length and finiteness

    static Matrix identity(int n);

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }

    long long nonzero_count() const;
};

/// result[i] = sum_j M[i,j] * v[j]; rejects a column/length mismatch with a
/// shape error naming both dimensions.
Vector matvec(const Matrix& m, const Vector& v);

/// In-place variant for hot loops; `out` is resized to m.rows.
void matvec_into(const Matrix& m, const Vector& v, Vector& out);

double frobenius_norm(const Matrix& m);

double norm2(const Vector& v);
double dot(const Vector& a, const Vector& b);

/// Exact Euclidean projection onto the Frobenius ball of the given radius:
/// radial scaling when the norm exceeds the bound, identity otherwise.
Matrix project_frobenius_ball(const Matrix& m, double bound);
void project_frobenius_ball_inplace(Matrix& m, double bound);

void require_finite(const std::vector<double>& values, const char* what);

}  // namespace ganlab
