// tensor.cpp - multiset indexing, dense tensors and k-mode products.
#include "dlyap/tensor.hpp"

#include "dlyap/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace dlyap {

std::shared_ptr<const MultisetIndex> MultisetIndex::get(int p, int n) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const MultisetIndex>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{p, n}];
    if (!slot) slot = std::make_shared<const MultisetIndex>(p, n);
    return slot;
}

MultisetIndex::MultisetIndex(int p, int n) : p_(p), n_(n) {
    if (p <= 0 || n <= 0) throw InvalidArgument("multiset index needs positive dimension and order");
    std::size_t dense = 1;
    for (int k = 0; k < n; ++k) {
        dense *= static_cast<std::size_t>(p);
        if (dense > (std::size_t{1} << 24)) throw InvalidArgument("tensor too large");
    }
    std::map<std::vector<int>, std::size_t> pos;
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    // Lexicographic enumeration of nondecreasing tuples.
    while (true) {
        pos.emplace(cur, multisets_.size());
        multisets_.push_back(cur);
        int k = n - 1;
        while (k >= 0 && cur[static_cast<std::size_t>(k)] == p - 1) --k;
        if (k < 0) break;
        const int v = cur[static_cast<std::size_t>(k)] + 1;
        for (int m = k; m < n; ++m) cur[static_cast<std::size_t>(m)] = v;
    }
    dense_to_canonical_.resize(dense);
    multiplicity_.assign(multisets_.size(), 0);
    for (std::size_t d = 0; d < dense; ++d) {
        std::vector<int> t = dense_tuple(d);
        std::sort(t.begin(), t.end());
        const std::size_t c = pos.at(t);
        dense_to_canonical_[d] = c;
        ++multiplicity_[c];
    }
}

std::size_t MultisetIndex::dense_index(const std::vector<int>& index) const {
    if (static_cast<int>(index.size()) != n_) throw DimensionMismatch("index length differs from tensor order");
    std::size_t d = 0;
    for (int v : index) {
        if (v < 0 || v >= p_) throw InvalidArgument("tensor index out of range");
        d = d * static_cast<std::size_t>(p_) + static_cast<std::size_t>(v);
    }
    return d;
}

std::vector<int> MultisetIndex::dense_tuple(std::size_t dense) const {
    std::vector<int> t(static_cast<std::size_t>(n_));
    for (int k = n_ - 1; k >= 0; --k) {
        t[static_cast<std::size_t>(k)] = static_cast<int>(dense % static_cast<std::size_t>(p_));
        dense /= static_cast<std::size_t>(p_);
    }
    return t;
}

std::size_t MultisetIndex::position(const std::vector<int>& index) const {
    return dense_to_canonical_[dense_index(index)];
}

DenseTensor::DenseTensor(std::vector<int> dimensions) : dims(std::move(dimensions)) {
    std::size_t total = 1;
    for (int d : dims) {
        if (d <= 0) throw InvalidArgument("tensor dimensions must be positive");
        total *= static_cast<std::size_t>(d);
    }
    data.assign(total, 0.0);
}

std::size_t DenseTensor::linear(const std::vector<int>& index) const {
    if (index.size() != dims.size()) throw DimensionMismatch("index length differs from tensor order");
    std::size_t d = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (index[k] < 0 || index[k] >= dims[k]) throw InvalidArgument("tensor index out of range");
        d = d * static_cast<std::size_t>(dims[k]) + static_cast<std::size_t>(index[k]);
    }
    return d;
}

SymmetricTensor::SymmetricTensor(int order, int p)
    : index_(MultisetIndex::get(p, order)), values_(index_->size(), 0.0) {}

DenseTensor SymmetricTensor::to_dense() const {
    DenseTensor out(std::vector<int>(static_cast<std::size_t>(order()), p()));
    for (std::size_t d = 0; d < out.data.size(); ++d) out.data[d] = values_[index_->position_of_dense(d)];
    return out;
}

SymmetricTensor SymmetricTensor::from_dense(const DenseTensor& dense, double* defect) {
    if (dense.dims.empty()) throw DimensionMismatch("cannot fold an order-zero tensor");
    const int p = dense.dims.front();
    for (int d : dense.dims)
        if (d != p) throw DimensionMismatch("folding requires equal mode dimensions");
    SymmetricTensor out(dense.order(), p);
    const MultisetIndex& idx = *out.index_;
    for (std::size_t d = 0; d < dense.data.size(); ++d) out.values_[idx.position_of_dense(d)] += dense.data[d];
    for (std::size_t k = 0; k < out.values_.size(); ++k) out.values_[k] /= static_cast<double>(idx.multiplicity(k));
    if (defect) {
        double worst = 0.0;
        for (std::size_t d = 0; d < dense.data.size(); ++d) {
            worst = std::max(worst, std::abs(dense.data[d] - out.values_[idx.position_of_dense(d)]));
        }
        *defect = worst;
    }
    return out;
}

double SymmetricTensor::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool SymmetricTensor::is_diagonal_position(std::size_t k) const {
    const auto& ms = index_->multiset(k);
    return ms.front() == ms.back();
}

DenseTensor k_mode_product(const DenseTensor& T, const Eigen::MatrixXd& M, int k) {
    if (k < 0 || k >= T.order()) throw DimensionMismatch("mode index out of range");
    const auto K = static_cast<std::size_t>(k);
    if (M.cols() != T.dims[K]) throw DimensionMismatch("matrix column count differs from the mode dimension");
    std::vector<int> out_dims = T.dims;
    out_dims[K] = static_cast<int>(M.rows());
    DenseTensor out(out_dims);

    std::size_t outer = 1;
    for (std::size_t m = 0; m < K; ++m) outer *= static_cast<std::size_t>(T.dims[m]);
    std::size_t inner = 1;
    for (std::size_t m = K + 1; m < T.dims.size(); ++m) inner *= static_cast<std::size_t>(T.dims[m]);
    const auto din = static_cast<std::size_t>(T.dims[K]);
    const auto dout = static_cast<std::size_t>(M.rows());
    for (std::size_t a = 0; a < outer; ++a) {
        for (std::size_t j = 0; j < dout; ++j) {
            double* dst = &out.data[(a * dout + j) * inner];
            for (std::size_t i = 0; i < din; ++i) {
                const double m = M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
                if (m == 0.0) continue;
                const double* src = &T.data[(a * din + i) * inner];
                for (std::size_t b = 0; b < inner; ++b) dst[b] += m * src[b];
            }
        }
    }
    return out;
}

DenseTensor tucker_product(const DenseTensor& T, const Eigen::MatrixXd& M) {
    DenseTensor out = T;
    for (int k = 0; k < T.order(); ++k) out = k_mode_product(out, M, k);
    return out;
}

std::string index_key(const std::vector<int>& index) {
    std::ostringstream os;
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (k) os << ',';
        os << index[k];
    }
    return os.str();
}

double max_abs_difference(const SymmetricTensor& a, const SymmetricTensor& b) {
    if (a.order() != b.order() || a.p() != b.p()) throw DimensionMismatch("tensor shapes differ");
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

} // namespace dlyap
