// tensor.hpp - dense tensors, symmetric tensors keyed by index multisets, k-mode products.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace dlyap {

/// Enumeration of sorted index tuples (i1 <= ... <= in) over {0..p-1}, in
/// lexicographic order, together with the map from dense positions.
class MultisetIndex {
public:
    /// Shared, cached instance for (p, n).
    static std::shared_ptr<const MultisetIndex> get(int p, int n);

    MultisetIndex(int p, int n);

    int p() const noexcept { return p_; }
    int order() const noexcept { return n_; }
    std::size_t size() const noexcept { return multisets_.size(); }
    std::size_t dense_size() const noexcept { return dense_to_canonical_.size(); }
    const std::vector<std::vector<int>>& multisets() const noexcept { return multisets_; }
    const std::vector<int>& multiset(std::size_t k) const { return multisets_.at(k); }
    /// Canonical position of an arbitrary (unsorted) index tuple.
    std::size_t position(const std::vector<int>& index) const;
    /// Canonical position of a dense linear index (first index most significant).
    std::size_t position_of_dense(std::size_t dense) const { return dense_to_canonical_.at(dense); }
    /// Dense linear index of a tuple (first index most significant).
    std::size_t dense_index(const std::vector<int>& index) const;
    /// Tuple of a dense linear index.
    std::vector<int> dense_tuple(std::size_t dense) const;
    /// Number of dense tuples that fold onto canonical position k.
    std::size_t multiplicity(std::size_t k) const { return multiplicity_.at(k); }

private:
    int p_;
    int n_;
    std::vector<std::vector<int>> multisets_;
    std::vector<std::size_t> dense_to_canonical_;
    std::vector<std::size_t> multiplicity_;
};

/// Dense tensor with arbitrary mode dimensions, stored with the first index most significant.
struct DenseTensor {
    std::vector<int> dims;
    std::vector<double> data;

    DenseTensor() = default;
    explicit DenseTensor(std::vector<int> dimensions);

    int order() const noexcept { return static_cast<int>(dims.size()); }
    std::size_t linear(const std::vector<int>& index) const;
    double& operator()(const std::vector<int>& index) { return data[linear(index)]; }
    double operator()(const std::vector<int>& index) const { return data[linear(index)]; }
};

/// Order-n symmetric tensor over p variables, one value per index multiset.
class SymmetricTensor {
public:
    SymmetricTensor() = default;
    SymmetricTensor(int order, int p);

    int order() const noexcept { return index_ ? index_->order() : 0; }
    int p() const noexcept { return index_ ? index_->p() : 0; }
    std::size_t size() const noexcept { return values_.size(); }
    const MultisetIndex& index() const { return *index_; }

    /// Entry for any ordering of the indices.
    double at(const std::vector<int>& index) const { return values_[index_->position(index)]; }
    double operator()(std::initializer_list<int> index) const { return at(std::vector<int>(index)); }
    void set(const std::vector<int>& index, double value) { values_[index_->position(index)] = value; }

    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

    /// Full pⁿ expansion reproducing every permuted index.
    DenseTensor to_dense() const;
    /// Folds a dense tensor by averaging permuted entries. When defect is given it
    /// receives the largest deviation of a dense entry from its folded value.
    static SymmetricTensor from_dense(const DenseTensor& dense, double* defect = nullptr);

    /// Largest absolute entry.
    double max_abs() const;
    /// True when all indices of canonical position k are equal.
    bool is_diagonal_position(std::size_t k) const;

private:
    std::shared_ptr<const MultisetIndex> index_;
    std::vector<double> values_;
};

/// (T ×_k M): contracts mode k (0-based) of T with the columns of M.
/// Throws DimensionMismatch when dims[k] != M.cols().
DenseTensor k_mode_product(const DenseTensor& T, const Eigen::MatrixXd& M, int k);

/// T ×_1 M ×_2 M ... ×_n M.
DenseTensor tucker_product(const DenseTensor& T, const Eigen::MatrixXd& M);

/// Comma separated key such as "0,0,1".
std::string index_key(const std::vector<int>& index);

/// Max absolute entrywise difference; throws DimensionMismatch on shape mismatch.
double max_abs_difference(const SymmetricTensor& a, const SymmetricTensor& b);

} // namespace dlyap
