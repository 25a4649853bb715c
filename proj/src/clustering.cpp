#include "epiclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>

namespace epiclust {

void DistanceMatrix::validate() const {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (values.rows() != n || values.cols() != n)
        throw InputError("distance matrix shape does not match labels");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (values(i, i) != 0.0) throw InputError("distance matrix diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::isfinite(values(i, j)) || values(i, j) < 0)
                throw InputError("distances must be finite and nonnegative");
            if (std::abs(values(i, j) - values(j, i)) > 1e-12)
                throw InputError("distance matrix is not symmetric");
        }
    }
}

Linkage linkage_from_name(const std::string& name) {
    if (name == "complete") return Linkage::Complete;
    if (name == "single") return Linkage::Single;
    if (name == "average") return Linkage::Average;
    if (name == "ward") return Linkage::Ward;
    throw InputError("unknown linkage: " + name);
}

const char* linkage_name(Linkage l) {
    switch (l) {
        case Linkage::Complete: return "complete";
        case Linkage::Single: return "single";
        case Linkage::Average: return "average";
        case Linkage::Ward: return "ward";
    }
    return "?";
}

void Dendrogram::validate() const {
    const std::size_t n = leaves.size();
    if (merges.size() + 1 != n) throw InputError("dendrogram must have n-1 merges");
    std::vector<bool> used(2 * n - 1, false);
    for (std::size_t k = 0; k < merges.size(); ++k) {
        const auto& m = merges[k];
        int limit = static_cast<int>(n + k);
        if (m.left < 0 || m.right < 0 || m.left >= limit || m.right >= limit || m.left == m.right)
            throw InputError("dendrogram merge references an invalid node");
        if (used[m.left] || used[m.right])
            throw InputError("dendrogram node used as a child twice");
        used[m.left] = used[m.right] = true;
    }
}

DistanceMatrix pairwise_euclidean(const std::vector<std::string>& labels,
                                  const Matrix& features) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (features.rows() != n)
        throw InputError("feature row count does not match labels");
    if (n < 2) throw InputError("need at least two points");
    DistanceMatrix d;
    d.labels = labels;
    d.values = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v = (features.row(i) - features.row(j)).norm();
            d.values(i, j) = d.values(j, i) = v;
        }
    return d;
}

Dendrogram agglomerate(const DistanceMatrix& d, Linkage linkage) {
    d.validate();
    const int n = static_cast<int>(d.labels.size());
    if (n < 2) throw InputError("clustering needs at least two points");

    const bool squared = linkage == Linkage::Ward;
    Matrix dist = squared ? Matrix(d.values.cwiseAbs2()) : d.values;

    struct Cluster {
        int node;      // dendrogram node id
        int min_leaf;  // lowest original leaf index, for tie-breaking
        int size;
        bool alive = true;
    };
    std::vector<Cluster> cl(n);
    for (int i = 0; i < n; ++i) cl[i] = {i, i, 1, true};

    Dendrogram out;
    out.leaves = d.labels;
    for (int step = 0; step < n - 1; ++step) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!cl[i].alive) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!cl[j].alive) continue;
                double v = dist(i, j);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                } else if (v == best) {
                    auto key = std::minmax(cl[i].min_leaf, cl[j].min_leaf);
                    auto cur = std::minmax(cl[bi].min_leaf, cl[bj].min_leaf);
                    if (key < cur) {
                        bi = i;
                        bj = j;
                    }
                }
            }
        }

        const double na = cl[bi].size, nb = cl[bj].size;
        for (int k = 0; k < n; ++k) {
            if (!cl[k].alive || k == bi || k == bj) continue;
            double da = dist(bi, k), db = dist(bj, k), merged = 0;
            switch (linkage) {
                case Linkage::Complete: merged = std::max(da, db); break;
                case Linkage::Single: merged = std::min(da, db); break;
                case Linkage::Average: merged = (na * da + nb * db) / (na + nb); break;
                case Linkage::Ward: {
                    const double nk = cl[k].size;
                    merged = ((na + nk) * da + (nb + nk) * db - nk * dist(bi, bj)) /
                             (na + nb + nk);
                    break;
                }
            }
            dist(bi, k) = dist(k, bi) = merged;
        }

        Merge m;
        // children ordered by lowest original leaf index; keeps traversal stable
        if (cl[bi].min_leaf <= cl[bj].min_leaf) {
            m.left = cl[bi].node;
            m.right = cl[bj].node;
        } else {
            m.left = cl[bj].node;
            m.right = cl[bi].node;
        }
        m.height = squared ? std::sqrt(best) : best;
        m.size = static_cast<int>(na + nb);
        out.merges.push_back(m);

        cl[bi].node = n + step;
        cl[bi].min_leaf = std::min(cl[bi].min_leaf, cl[bj].min_leaf);
        cl[bi].size = m.size;
        cl[bj].alive = false;
    }
    return out;
}

namespace {

// leaves under each node, in traversal order
std::vector<std::vector<int>> leaf_sets(const Dendrogram& dend) {
    const int n = static_cast<int>(dend.leaves.size());
    std::vector<std::vector<int>> sets(2 * n - 1);
    for (int i = 0; i < n; ++i) sets[i] = {i};
    for (std::size_t k = 0; k < dend.merges.size(); ++k) {
        auto& s = sets[n + k];
        s = sets[dend.merges[k].left];
        s.insert(s.end(), sets[dend.merges[k].right].begin(),
                 sets[dend.merges[k].right].end());
    }
    return sets;
}

}  // namespace

ClusterAssignment cut(const Dendrogram& dend, double height) {
    dend.validate();
    if (!(height >= 0)) throw InputError("cut height must be nonnegative");
    const int n = static_cast<int>(dend.leaves.size());

    // union-find over merges at or below the cut height
    std::vector<int> parent(2 * n - 1);
    for (int i = 0; i < 2 * n - 1; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t k = 0; k < dend.merges.size(); ++k) {
        const auto& m = dend.merges[k];
        int node = n + static_cast<int>(k);
        if (m.height <= height) {
            parent[find(m.left)] = node;
            parent[find(m.right)] = node;
        }
    }

    ClusterAssignment out;
    out.cut_height = height;
    std::map<int, int> id_of_root;
    for (const auto& leaf : leaf_order(dend)) {
        int li = static_cast<int>(std::find(dend.leaves.begin(), dend.leaves.end(), leaf) -
                                  dend.leaves.begin());
        int root = find(li);
        auto [it, inserted] = id_of_root.try_emplace(root, static_cast<int>(id_of_root.size()) + 1);
        out.cluster_of[leaf] = it->second;
    }
    out.num_clusters = static_cast<int>(id_of_root.size());
    return out;
}

std::vector<std::string> leaf_order(const Dendrogram& dend) {
    dend.validate();
    const int n = static_cast<int>(dend.leaves.size());
    if (n == 1) return dend.leaves;
    auto sets = leaf_sets(dend);
    std::vector<std::string> out;
    out.reserve(n);
    for (int idx : sets.back()) out.push_back(dend.leaves[idx]);
    return out;
}

DistanceMatrix seriate(const DistanceMatrix& d, const std::vector<std::string>& order) {
    d.validate();
    const auto n = static_cast<Eigen::Index>(d.labels.size());
    if (order.size() != d.labels.size())
        throw InputError("seriation order is not a permutation of the labels");
    std::vector<Eigen::Index> perm;
    perm.reserve(order.size());
    for (const auto& label : order) {
        auto it = std::find(d.labels.begin(), d.labels.end(), label);
        if (it == d.labels.end())
            throw InputError("seriation order contains unknown label: " + label);
        perm.push_back(it - d.labels.begin());
    }
    if (std::set<Eigen::Index>(perm.begin(), perm.end()).size() != order.size())
        throw InputError("seriation order repeats a label");

    DistanceMatrix out;
    out.labels = order;
    out.values = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out.values(i, j) = d.values(perm[i], perm[j]);
    return out;
}

std::string to_newick(const Dendrogram& dend) {
    dend.validate();
    const int n = static_cast<int>(dend.leaves.size());
    auto height_of = [&](int node) {
        return node < n ? 0.0 : dend.merges[node - n].height;
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    std::function<std::string(int, double)> render = [&](int node, double parent_h) {
        std::string body;
        if (node < n) {
            body = dend.leaves[node];
        } else {
            const auto& m = dend.merges[node - n];
            body = "(" + render(m.left, m.height) + "," + render(m.right, m.height) + ")";
        }
        return body + ":" + fmt(parent_h - height_of(node));
    };
    const auto& m = dend.merges.back();
    return "(" + render(m.left, m.height) + "," + render(m.right, m.height) + ");";
}

}  // namespace epiclust
