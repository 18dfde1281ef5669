// linalg.hpp - numeric rank, rank-revealing block solves and exact rational elimination.
#pragma once

#include "dlyap/polynomial.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dlyap {

/// Singular values below σ_max · max(rows, cols) · relative count as zero.
struct RankPolicy {
    double relative = 1e-12;
};

struct RankResult {
    int rank = 0;
    Eigen::VectorXd singular_values;
    double threshold = 0.0;
    /// σ_rank / σ_{rank+1}; infinite when no singular value was dropped, 0 when rank is 0.
    double gap = 0.0;
};

RankResult numeric_rank(const Eigen::MatrixXd& M, const RankPolicy& policy = {});

struct BlockSolution {
    Eigen::VectorXd x;
    int rank = 0;
    double condition_number = 0.0;
};

/// Least-squares solve of M x = b through the SVD. Throws SingularBlock tagged with
/// `vertex` when M has deficient column rank under the policy.
BlockSolution rank_revealing_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& b, int vertex,
                                   const RankPolicy& policy = {});

using RationalMatrix = std::vector<std::vector<Rational>>;
using IntMatrix = std::vector<std::vector<long>>;

RationalMatrix to_rational(const IntMatrix& M);

/// Reduced row echelon form by exact elimination; rank receives the pivot count.
RationalMatrix rref(RationalMatrix M, int* rank = nullptr);
int exact_rank(const IntMatrix& M);

/// Nonzero rows of the reduced row echelon form; equal iff the row spaces agree.
RationalMatrix row_space_basis(const IntMatrix& M);
bool same_row_space(const IntMatrix& A, const IntMatrix& B);

/// Basis of {x : M x = 0} with primitive integer vectors (one per free column).
std::vector<std::vector<BigInt>> integer_kernel(const IntMatrix& M);

} // namespace dlyap
