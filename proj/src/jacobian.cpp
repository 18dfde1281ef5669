// jacobian.cpp - modified Jacobian assembly, rank computations and local identifiability verdicts.
#include "dlyap/jacobian.hpp"

#include "dlyap/error.hpp"
#include "dlyap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace dlyap {

double j2_entry(const Eigen::MatrixXd& A, const SymmetricTensor& S, int i, int j, const Edge& col) {
    const int p = S.p();
    const int alpha = col.from;
    const int beta = col.to;
    double out = 0.0;
    if (j == beta)
        for (int l = 0; l < p; ++l) out += A(i, l) * S({l, alpha});
    if (i == beta)
        for (int k = 0; k < p; ++k) out += A(j, k) * S({k, alpha});
    return out;
}

double j3_entry(const Eigen::MatrixXd& A, const SymmetricTensor& T, int i, int j, int k, const Edge& col) {
    const int p = T.p();
    const int alpha = col.from;
    const int beta = col.to;
    double out = 0.0;
    if (i == beta)
        for (int m = 0; m < p; ++m)
            for (int n = 0; n < p; ++n) out += A(j, m) * A(k, n) * T({alpha, m, n});
    if (j == beta)
        for (int l = 0; l < p; ++l)
            for (int n = 0; n < p; ++n) out += A(i, l) * A(k, n) * T({l, alpha, n});
    if (k == beta)
        for (int l = 0; l < p; ++l)
            for (int m = 0; m < p; ++m) out += A(i, l) * A(j, m) * T({l, m, alpha});
    return out;
}

Eigen::MatrixXd ModifiedJacobian::offdiag_block() const {
    std::vector<Eigen::Index> keep;
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (!rows[r].diagonal) keep.push_back(static_cast<Eigen::Index>(r));
    Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(num_edges));
    for (std::size_t r = 0; r < keep.size(); ++r)
        out.row(static_cast<Eigen::Index>(r)) = matrix.row(keep[r]).head(static_cast<Eigen::Index>(num_edges));
    return out;
}

std::size_t ModifiedJacobian::rows_of_order(int order) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [order](const JacobianRow& r) { return r.order == order; }));
}

std::vector<std::pair<int, int>> two_cycle_components(const DirectedGraph& g) {
    std::vector<std::pair<int, int>> out;
    for (const auto& comp : g.weak_components()) {
        if (comp.size() != 2) continue;
        const int u = comp[0];
        const int v = comp[1];
        if (g.has_edge(u, v) && g.has_edge(v, u)) out.emplace_back(u, v);
    }
    return out;
}

namespace {

struct OrderRows {
    int order = 0;
    std::vector<std::vector<int>> multisets;
};

// Edge columns of one order for the given canonical rows, assembled from the dense
// pⁿ rows and folded with a symmetry assertion.
Eigen::MatrixXd edge_columns(const ParameterMatrix& A, const SymmetricTensor& T,
                             const std::vector<std::vector<int>>& multisets, double tol) {
    const int n = T.order();
    const int p = T.p();
    const auto& edges = A.graph().edges();
    DenseTensor N = T.to_dense();
    for (int k = 1; k < n; ++k) N = k_mode_product(N, A.entries(), k);
    const MultisetIndex& idx = T.index();

    std::vector<long> row_of(idx.size(), -1);
    for (std::size_t r = 0; r < multisets.size(); ++r) row_of[idx.position(multisets[r])] = static_cast<long>(r);

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(multisets.size()),
                                                static_cast<Eigen::Index>(edges.size()));
    std::vector<char> seen(multisets.size(), 0);
    double max_dev = 0.0;
    std::vector<int> rest(static_cast<std::size_t>(n));
    std::vector<double> value(edges.size());
    for (std::size_t d = 0; d < idx.dense_size(); ++d) {
        const long r = row_of[idx.position_of_dense(d)];
        if (r < 0) continue;
        const std::vector<int> tuple = idx.dense_tuple(d);
        for (std::size_t c = 0; c < edges.size(); ++c) {
            double v = 0.0;
            for (int k = 0; k < n; ++k) {
                if (tuple[static_cast<std::size_t>(k)] != edges[c].to) continue;
                // N indexed by (α, remaining indices in order).
                rest[0] = edges[c].from;
                std::size_t pos = 1;
                for (int m = 0; m < n; ++m)
                    if (m != k) rest[pos++] = tuple[static_cast<std::size_t>(m)];
                std::size_t lin = 0;
                for (int x : rest) lin = lin * static_cast<std::size_t>(p) + static_cast<std::size_t>(x);
                v += N.data[lin];
            }
            value[c] = v;
        }
        const auto R = static_cast<Eigen::Index>(r);
        if (!seen[static_cast<std::size_t>(r)]) {
            for (std::size_t c = 0; c < edges.size(); ++c) out(R, static_cast<Eigen::Index>(c)) = value[c];
            seen[static_cast<std::size_t>(r)] = 1;
        } else {
            for (std::size_t c = 0; c < edges.size(); ++c)
                max_dev = std::max(max_dev, std::abs(out(R, static_cast<Eigen::Index>(c)) - value[c]));
        }
    }
    const double scale = std::max(out.cwiseAbs().maxCoeff(), 1e-300);
    if (max_dev > tol * scale) throw Error("Jacobian rows differ across index permutations");
    return out;
}

} // namespace

ModifiedJacobian build_modified_jacobian(const ParameterMatrix& A, const std::map<int, DiagonalCumulant>& omegas,
                                         const JacobianOptions& opt) {
    A.require_stable();
    const DirectedGraph& g = A.graph();
    const int p = g.p();
    std::set<int> full(opt.orders.begin(), opt.orders.end());
    if (full.empty()) throw InvalidArgument("at least one order is required");
    for (int n : full)
        if (n < 2 || n > 4) throw InvalidArgument("Jacobian orders must lie in {2,3,4}");
    const auto cycles = opt.fourth_order_augmentation ? two_cycle_components(g) : std::vector<std::pair<int, int>>{};
    const bool augment = !cycles.empty() && !full.count(4);

    std::vector<OrderRows> blocks;
    for (int n : full) blocks.push_back({n, MultisetIndex::get(p, n)->multisets()});
    if (augment) {
        OrderRows extra{4, {}};
        for (const auto& [u, v] : cycles) {
            extra.multisets.push_back({u, u, u, u});
            extra.multisets.push_back({v, v, v, v});
            extra.multisets.push_back({u, u, u, v});
        }
        std::sort(extra.multisets.begin(), extra.multisets.end());
        blocks.push_back(std::move(extra));
    }

    ModifiedJacobian mj;
    mj.augmented = augment;
    mj.num_edges = g.num_edges();
    for (const OrderRows& b : blocks) mj.orders.push_back(b.order);
    for (const Edge& e : g.edges()) mj.columns.push_back({JacobianColumn::Kind::Edge, e, 0, 0});
    for (int n : full)
        for (int v = 0; v < p; ++v) mj.columns.push_back({JacobianColumn::Kind::Omega, Edge{}, n, v});
    if (augment) {
        std::vector<int> verts;
        for (const auto& [u, v] : cycles) {
            verts.push_back(u);
            verts.push_back(v);
        }
        std::sort(verts.begin(), verts.end());
        for (int v : verts) mj.columns.push_back({JacobianColumn::Kind::Omega, Edge{}, 4, v});
    }

    std::size_t total_rows = 0;
    for (const OrderRows& b : blocks) total_rows += b.multisets.size();
    mj.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total_rows), static_cast<Eigen::Index>(mj.columns.size()));

    Eigen::Index row0 = 0;
    for (const OrderRows& b : blocks) {
        const auto it = omegas.find(b.order);
        if (it == omegas.end()) throw InvalidArgument("missing noise cumulant of order " + std::to_string(b.order));
        const SymmetricTensor T = doubling_cumulant(A, it->second);
        const Eigen::MatrixXd E = edge_columns(A, T, b.multisets, opt.symmetry_tol);
        mj.matrix.block(row0, 0, E.rows(), E.cols()) = E;
        for (std::size_t r = 0; r < b.multisets.size(); ++r) {
            const auto& ms = b.multisets[r];
            const bool diag = ms.front() == ms.back();
            mj.rows.push_back({b.order, ms, diag});
            if (!diag) continue;
            for (std::size_t c = mj.num_edges; c < mj.columns.size(); ++c) {
                const JacobianColumn& col = mj.columns[c];
                if (col.order == b.order && col.vertex == ms.front()) {
                    mj.matrix(row0 + static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 1.0;
                }
            }
        }
        row0 += E.rows();
    }
    return mj;
}

RankResult offdiag_rank(const ModifiedJacobian& mj, const RankPolicy& policy) {
    return numeric_rank(mj.offdiag_block(), policy);
}

LocalIdentifiabilityReport local_identifiability_verdict(const DirectedGraph& g, int trials, std::uint64_t seed,
                                                         const VerdictOptions& opt) {
    if (trials < 1) throw InvalidArgument("at least one trial is required");
    LocalIdentifiabilityReport rep;
    rep.orders = opt.orders;
    rep.edges = g.num_edges();

    auto run = [&](bool augment) {
        std::vector<TrialRank> out(static_cast<std::size_t>(trials));
        std::vector<std::size_t> rows(static_cast<std::size_t>(trials), 0);
        parallel_for(static_cast<std::size_t>(trials), opt.threads, [&](std::size_t t) {
            TrialRank tr;
            tr.seed = seed + t;
            tr.radius = t % 2 == 0 ? 0.6 : 0.3;
            const ModelPoint mp = sample_model_point(g, tr.seed, tr.radius);
            JacobianOptions jo;
            jo.orders = opt.orders;
            jo.fourth_order_augmentation = augment;
            const ModifiedJacobian mj =
                build_modified_jacobian(mp.A, {{2, mp.omega2}, {3, mp.omega3}, {4, mp.omega4}}, jo);
            const Eigen::MatrixXd off = mj.offdiag_block();
            const RankResult rr = numeric_rank(off, opt.rank_policy);
            tr.rank = rr.rank;
            tr.gap = rr.gap;
            tr.sigma_max = rr.singular_values.size() ? rr.singular_values[0] : 0.0;
            tr.sigma_min = rr.singular_values.size() ? rr.singular_values[rr.singular_values.size() - 1] : 0.0;
            rows[t] = static_cast<std::size_t>(off.rows());
            out[t] = tr;
        });
        rep.offdiag_rows = rows.front();
        return out;
    };

    auto generic = [](const std::vector<TrialRank>& ts) {
        int r = 0;
        for (const TrialRank& t : ts) r = std::max(r, t.rank);
        return r;
    };

    rep.trials = run(false);
    rep.generic_rank = generic(rep.trials);
    const bool has_order4 = std::find(opt.orders.begin(), opt.orders.end(), 4) != opt.orders.end();
    if (rep.generic_rank < static_cast<int>(rep.edges) && opt.allow_augmentation && !has_order4 &&
        !two_cycle_components(g).empty()) {
        std::vector<TrialRank> aug = run(true);
        const int r = generic(aug);
        if (r > rep.generic_rank) {
            rep.trials = std::move(aug);
            rep.generic_rank = r;
            rep.augmented = true;
            rep.note = "order-4 rows (uuuu),(vvvv),(uuuv) added per two-cycle component";
        }
    }
    rep.deficiency = static_cast<int>(rep.edges) - rep.generic_rank;
    if (rep.deficiency == 0) {
        rep.verdict = "locally identifiable";
        rep.locally_identifiable = true;
        return rep;
    }
    if (rep.offdiag_rows < rep.edges) {
        rep.verdict = "not locally identifiable";
        rep.structural = true;
        rep.note = "fewer off-diagonal equations than edge parameters";
        return rep;
    }
    bool unanimous = true;
    double min_gap = std::numeric_limits<double>::infinity();
    for (const TrialRank& t : rep.trials) {
        if (t.rank != rep.generic_rank) unanimous = false;
        // An identically zero block has no singular-value gap to measure.
        const double gap = t.sigma_max == 0.0 ? std::numeric_limits<double>::infinity() : t.gap;
        min_gap = std::min(min_gap, gap);
    }
    if (unanimous && min_gap >= opt.structural_gap) {
        rep.verdict = "not locally identifiable";
        rep.structural = true;
        rep.note = "rank deficiency is unanimous across trials with a clear singular-value gap";
    } else {
        rep.verdict = "inconclusive";
        rep.note = "rank deficiency without unanimity or without a clear singular-value gap";
    }
    return rep;
}

FullRankSweep full_rank_sweep(const std::vector<DirectedGraph>& graphs, int seeds, std::uint64_t seed, int threads,
                              const RankPolicy& policy) {
    FullRankSweep out;
    out.graphs = graphs.size();
    std::vector<int> deficient(graphs.size(), 0);
    std::vector<int> split(graphs.size(), 0);
    std::vector<double> gaps(graphs.size(), std::numeric_limits<double>::infinity());
    parallel_for(graphs.size(), threads, [&](std::size_t k) {
        const DirectedGraph& g = graphs[k];
        const int edges = static_cast<int>(g.num_edges());
        int lo = edges;
        int hi = 0;
        for (int s = 0; s < seeds; ++s) {
            const ModelPoint mp = sample_model_point(g, seed + static_cast<std::uint64_t>(s), 0.6);
            const ModifiedJacobian mj = build_modified_jacobian(mp.A, {{2, mp.omega2}, {3, mp.omega3}});
            const RankResult rr = offdiag_rank(mj, policy);
            lo = std::min(lo, rr.rank);
            hi = std::max(hi, rr.rank);
            if (rr.rank == edges) gaps[k] = std::min(gaps[k], rr.singular_values[rr.singular_values.size() - 1] /
                                                                 rr.singular_values[0]);
        }
        deficient[k] = lo < edges;
        split[k] = lo != hi;
    });
    out.evaluations = graphs.size() * static_cast<std::size_t>(std::max(seeds, 0));
    out.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        if (deficient[k]) out.deficient.push_back(graphs[k].describe());
        if (split[k]) out.non_unanimous.push_back(graphs[k].describe());
        out.min_gap = std::min(out.min_gap, gaps[k]);
    }
    return out;
}

} // namespace dlyap
