#include "ganlab/linalg.hpp"

#include <cmath>
#include <string>

#include "ganlab/errors.hpp"

namespace ganlab {

void require_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(what) + ": non-finite entry " + std::to_string(v));
        }
    }
}

Matrix::Matrix(int r, int c) : rows(r), cols(c) {
    if (r <= 0 || c <= 0) {
        throw NumericError("matrix dimensions must be positive, got " + std::to_string(r) + "x" +
                           std::to_string(c));
    }
    values.assign(static_cast<std::size_t>(r) * c, 0.0);
}

Matrix::Matrix(int r, int c, std::vector<double> vals) : rows(r), cols(c), values(std::move(vals)) {
    if (r <= 0 || c <= 0) {
        throw NumericError("matrix dimensions must be positive, got " + std::to_string(r) + "x" +
                           std::to_string(c));
    }
    if (values.size() != static_cast<std::size_t>(r) * c) {
        throw NumericError("matrix value count " + std::to_string(values.size()) +
                           " does not match shape " + std::to_string(r) + "x" + std::to_string(c));
    }
    require_finite(values, "matrix");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

long long Matrix::nonzero_count() const {
    long long count = 0;
    for (double v : values) {
        if (v != 0.0) ++count;
    }
    return count;
}

Vector matvec(const Matrix& m, const Vector& v) {
    Vector out;
    matvec_into(m, v, out);
    return out;
}

void matvec_into(const Matrix& m, const Vector& v, Vector& out) {
    if (m.cols != static_cast<int>(v.size())) {
        throw NumericError("matvec shape mismatch: matrix is " + std::to_string(m.rows) + "x" +
                           std::to_string(m.cols) + " but vector has length " +
                           std::to_string(v.size()));
    }
    out.assign(static_cast<std::size_t>(m.rows), 0.0);
    const double* row = m.values.data();
    for (int i = 0; i < m.rows; ++i, row += m.cols) {
        double acc = 0.0;
        for (int j = 0; j < m.cols; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
}

double frobenius_norm(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.values) acc += v * v;
    return std::sqrt(acc);
}

double norm2(const Vector& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw NumericError("dot shape mismatch: lengths " + std::to_string(a.size()) + " and " +
                           std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Matrix project_frobenius_ball(const Matrix& m, double bound) {
    Matrix out = m;
    project_frobenius_ball_inplace(out, bound);
    return out;
}

void project_frobenius_ball_inplace(Matrix& m, double bound) {
    if (!(bound > 0.0)) {
        throw NumericError("projection bound must be positive, got " + std::to_string(bound));
    }
    // Rescale until the recomputed norm is inside the ball; a single scaling
    // can land an ulp above the bound, and re-projection must be a no-op.
    double norm = frobenius_norm(m);
    while (norm > bound) {
        const double scale = bound / norm;
        for (double& v : m.values) v *= scale;
        const double next = frobenius_norm(m);
        if (next >= norm) break;
        norm = next;
    }
}

}  // namespace ganlab
