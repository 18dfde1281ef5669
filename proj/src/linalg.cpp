// linalg.cpp - SVD rank decisions and exact rational row reduction.
#include "dlyap/linalg.hpp"

#include "dlyap/error.hpp"

#include <boost/integer/common_factor.hpp>

#include <algorithm>
#include <limits>

namespace dlyap {

RankResult numeric_rank(const Eigen::MatrixXd& M, const RankPolicy& policy) {
    RankResult out;
    if (M.size() == 0) return out;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    out.singular_values = svd.singularValues();
    const double smax = out.singular_values.size() ? out.singular_values[0] : 0.0;
    out.threshold = smax * static_cast<double>(std::max(M.rows(), M.cols())) * policy.relative;
    for (Eigen::Index k = 0; k < out.singular_values.size(); ++k)
        if (out.singular_values[k] > out.threshold) ++out.rank;
    if (out.rank == 0) {
        out.gap = 0.0;
    } else if (out.rank == out.singular_values.size()) {
        out.gap = std::numeric_limits<double>::infinity();
    } else {
        const double below = out.singular_values[out.rank];
        out.gap = below > 0.0 ? out.singular_values[out.rank - 1] / below : std::numeric_limits<double>::infinity();
    }
    return out;
}

BlockSolution rank_revealing_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& b, int vertex,
                                   const RankPolicy& policy) {
    if (M.rows() != b.size()) throw DimensionMismatch("right-hand side length differs from the row count");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    const double threshold = smax * static_cast<double>(std::max(M.rows(), M.cols())) * policy.relative;
    BlockSolution out;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv[k] > threshold) ++out.rank;
    const double smin = sv.size() ? sv[sv.size() - 1] : 0.0;
    out.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (out.rank < M.cols() || M.cols() == 0) {
        throw SingularBlock(vertex, out.condition_number, out.rank, static_cast<int>(M.cols()));
    }
    out.x = svd.solve(b);
    return out;
}

RationalMatrix to_rational(const IntMatrix& M) {
    RationalMatrix R;
    R.reserve(M.size());
    for (const auto& row : M) {
        std::vector<Rational> r;
        r.reserve(row.size());
        for (long v : row) r.emplace_back(v);
        R.push_back(std::move(r));
    }
    return R;
}

RationalMatrix rref(RationalMatrix M, int* rank) {
    const std::size_t rows = M.size();
    const std::size_t cols = rows ? M[0].size() : 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && M[pivot][c] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(M[pivot], M[r]);
        const Rational inv = 1 / M[r][c];
        for (std::size_t k = c; k < cols; ++k) M[r][k] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || M[i][c] == 0) continue;
            const Rational f = M[i][c];
            for (std::size_t k = c; k < cols; ++k) M[i][k] -= f * M[r][k];
        }
        ++r;
    }
    if (rank) *rank = static_cast<int>(r);
    return M;
}

int exact_rank(const IntMatrix& M) {
    int r = 0;
    rref(to_rational(M), &r);
    return r;
}

RationalMatrix row_space_basis(const IntMatrix& M) {
    int r = 0;
    RationalMatrix R = rref(to_rational(M), &r);
    R.resize(static_cast<std::size_t>(r));
    return R;
}

bool same_row_space(const IntMatrix& A, const IntMatrix& B) {
    if (!A.empty() && !B.empty() && A[0].size() != B[0].size()) return false;
    return row_space_basis(A) == row_space_basis(B);
}

std::vector<std::vector<BigInt>> integer_kernel(const IntMatrix& M) {
    std::vector<std::vector<BigInt>> out;
    if (M.empty()) return out;
    const std::size_t cols = M[0].size();
    int r = 0;
    const RationalMatrix R = rref(to_rational(M), &r);
    std::vector<std::size_t> pivot_col;
    std::vector<char> is_pivot(cols, 0);
    for (int i = 0; i < r; ++i) {
        std::size_t c = 0;
        while (R[static_cast<std::size_t>(i)][c] == 0) ++c;
        pivot_col.push_back(c);
        is_pivot[c] = 1;
    }
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(cols, 0);
        v[f] = 1;
        for (int i = 0; i < r; ++i) v[pivot_col[static_cast<std::size_t>(i)]] = -R[static_cast<std::size_t>(i)][f];
        BigInt lcm = 1;
        for (const Rational& q : v) lcm = boost::integer::lcm(lcm, denominator(q));
        std::vector<BigInt> iv(cols);
        BigInt g = 0;
        for (std::size_t k = 0; k < cols; ++k) {
            iv[k] = numerator(Rational(v[k] * lcm));
            g = boost::integer::gcd(g, abs(iv[k]));
        }
        if (g > 1)
            for (BigInt& x : iv) x /= g;
        out.push_back(std::move(iv));
    }
    return out;
}

} // namespace dlyap
