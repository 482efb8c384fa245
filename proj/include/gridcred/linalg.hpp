#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gridcred/common.hpp"

namespace gridcred {

// Row-major dense matrix, sized for network-scale problems (<= a few
// hundred buses). Larger sparse systems live in simplex.cpp.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// LU with partial pivoting; factors in place.
class DenseLu {
  public:
    explicit DenseLu(DenseMatrix a) : a_(std::move(a)), perm_(a_.rows()) {
        const std::size_t n = a_.rows();
        if (a_.cols() != n) throw InputError("DenseLu: matrix must be square");
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = std::fabs(a_.at(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                double v = std::fabs(a_.at(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best < 1e-13)
                throw StructureError("DenseLu: singular matrix at pivot " + std::to_string(k));
            if (piv != k) {
                for (std::size_t c = 0; c < n; ++c) std::swap(a_.at(k, c), a_.at(piv, c));
                std::swap(perm_[k], perm_[piv]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                double m = a_.at(i, k) / a_.at(k, k);
                a_.at(i, k) = m;
                if (m == 0.0) continue;
                for (std::size_t c = k + 1; c < n; ++c) a_.at(i, c) -= m * a_.at(k, c);
            }
        }
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        const std::size_t n = a_.rows();
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 1; i < n; ++i) {
            double s = x[i];
            for (std::size_t j = 0; j < i; ++j) s -= a_.at(i, j) * x[j];
            x[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= a_.at(ii, j) * x[j];
            x[ii] = s / a_.at(ii, ii);
        }
        return x;
    }

  private:
    DenseMatrix a_;
    std::vector<std::size_t> perm_;
};

// Least squares via normal equations; fine for the low-order polynomial
// fits used here (design matrices are tiny and well scaled after centering).
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& rows,
                                         const std::vector<double>& rhs) {
    const std::size_t m = rows.size();
    if (m == 0) throw FitError("least_squares: no rows");
    const std::size_t n = rows[0].size();
    DenseMatrix ata(n, n);
    std::vector<double> atb(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            atb[i] += rows[r][i] * rhs[r];
            for (std::size_t j = 0; j < n; ++j) ata.at(i, j) += rows[r][i] * rows[r][j];
        }
    }
    try {
        DenseLu lu(std::move(ata));
        return lu.solve(atb);
    } catch (const StructureError&) {
        throw FitError("least_squares: rank-deficient design matrix");
    }
}

}  // namespace gridcred
