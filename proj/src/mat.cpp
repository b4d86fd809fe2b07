#include "tdgan/mat.hpp"

#include <cmath>
#include <string>

#include "tdgan/errors.hpp"

namespace tdgan {

namespace {

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

}  // namespace

Mat::Mat(size_t rows, size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(size_t rows, size_t cols, std::vector<double> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("Mat data length " + std::to_string(data_.size()) + " != " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
    }
}

Mat Mat::identity(size_t n) {
    Mat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat& Mat::operator+=(const Mat& o) {
    require_same_shape(*this, o, "add");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    require_same_shape(*this, o, "sub");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Mat& Mat::axpy(double s, const Mat& o) {
    require_same_shape(*this, o, "axpy");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
    return *this;
}

void Mat::check_finite(const char* where) const {
    for (double v : data_) {
        if (!std::isfinite(v)) throw NumericError(std::string(where) + ": non-finite matrix entry");
    }
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(Mat a, double s) { return a *= s; }

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " * " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Mat c(a.rows(), b.cols());
    const size_t n = a.rows(), k = a.cols(), m = b.cols();
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    // i-k-j order keeps the inner loop contiguous in b and c
    for (size_t i = 0; i < n; ++i) {
        for (size_t kk = 0; kk < k; ++kk) {
            const double aik = pa[i * k + kk];
            if (aik == 0.0) continue;
            const double* brow = pb + kk * m;
            double* crow = pc + i * m;
            for (size_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw ShapeError("matmul_tn: inner dims disagree");
    Mat c(a.cols(), b.cols());
    const size_t n = a.cols(), k = a.rows(), m = b.cols();
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    for (size_t kk = 0; kk < k; ++kk) {
        const double* arow = pa + kk * n;
        const double* brow = pb + kk * m;
        for (size_t i = 0; i < n; ++i) {
            const double aik = arow[i];
            if (aik == 0.0) continue;
            double* crow = pc + i * m;
            for (size_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw ShapeError("matmul_nt: inner dims disagree");
    Mat c(a.rows(), b.rows());
    const size_t n = a.rows(), k = a.cols(), m = b.rows();
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    for (size_t i = 0; i < n; ++i) {
        const double* arow = pa + i * k;
        double* crow = pc + i * m;
        for (size_t j = 0; j < m; ++j) {
            const double* brow = pb + j * k;
            double acc = 0.0;
            for (size_t kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
            crow[j] = acc;
        }
    }
    return c;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Mat hadamard(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "hadamard");
    Mat c(a.rows(), a.cols());
    for (size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * b.data()[i];
    return c;
}

Mat row_sums(const Mat& a) {
    Mat s(a.rows(), 1);
    for (size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (size_t j = 0; j < a.cols(); ++j) acc += a(i, j);
        s(i, 0) = acc;
    }
    return s;
}

Mat add_col_broadcast(const Mat& a, const Mat& col) {
    if (col.cols() != 1 || col.rows() != a.rows()) throw ShapeError("add_col_broadcast: column shape mismatch");
    Mat c = a;
    for (size_t i = 0; i < a.rows(); ++i) {
        const double bi = col(i, 0);
        for (size_t j = 0; j < a.cols(); ++j) c(i, j) += bi;
    }
    return c;
}

double frobenius_norm(const Mat& a) {
    double acc = 0.0;
    for (double v : a.values()) acc += v * v;
    return std::sqrt(acc);
}

double max_abs_diff(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace tdgan
