#pragma once

#include <cstddef>
#include <vector>

namespace tdgan {

// Dense row-major double matrix. Batches live in the column dimension
// (one column per sample) throughout the library.
class Mat {
public:
    Mat() = default;
    Mat(size_t rows, size_t cols, double fill = 0.0);
    Mat(size_t rows, size_t cols, std::vector<double> data);

    static Mat zeros(size_t rows, size_t cols) { return Mat(rows, cols, 0.0); }
    static Mat identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
    double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);
    // this += s * o
    Mat& axpy(double s, const Mat& o);

    // Throws NumericError if any entry is NaN or infinite.
    void check_finite(const char* where) const;

private:
    size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(Mat a, double s);

// c = a * b
Mat matmul(const Mat& a, const Mat& b);
// c = a^T * b
Mat matmul_tn(const Mat& a, const Mat& b);
// c = a * b^T
Mat matmul_nt(const Mat& a, const Mat& b);

Mat transpose(const Mat& a);
Mat hadamard(const Mat& a, const Mat& b);
// Column vector of row sums (rows x 1).
Mat row_sums(const Mat& a);
// Add a column vector to every column of a.
Mat add_col_broadcast(const Mat& a, const Mat& col);

double frobenius_norm(const Mat& a);
double max_abs_diff(const Mat& a, const Mat& b);

}  // namespace tdgan
