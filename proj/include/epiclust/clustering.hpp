#pragma once

#include <map>
#include <vector>

#include "epiclust/types.hpp"

namespace epiclust {

struct DistanceMatrix {
    std::vector<std::string> labels;
    Matrix values;  // symmetric, zero diagonal

    void validate() const;
};

enum class Linkage { Complete, Single, Average, Ward };

Linkage linkage_from_name(const std::string& name);
const char* linkage_name(Linkage l);

/// One agglomeration step. Nodes 0..n-1 are leaves; merge k creates node n+k.
struct Merge {
    int left = -1;
    int right = -1;
    double height = 0.0;
    int size = 0;
};

struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;  // n-1 entries

    void validate() const;
};

struct ClusterAssignment {
    double cut_height = 0.0;
    std::map<std::string, int> cluster_of;  // label -> id, ids contiguous from 1
    int num_clusters = 0;
};

DistanceMatrix pairwise_euclidean(const std::vector<std::string>& labels,
                                  const Matrix& features);

/// Agglomerative clustering; complete linkage by default. Ties are broken by
/// the lexicographically smallest pair of lowest original leaf indices.
Dendrogram agglomerate(const DistanceMatrix& d, Linkage linkage = Linkage::Complete);

/// Clusters are maximal subtrees whose internal merge heights are <= height.
/// Ids are assigned in leaf-order of first appearance, starting at 1.
ClusterAssignment cut(const Dendrogram& dend, double height);

/// Left-to-right in-order traversal of the leaves.
std::vector<std::string> leaf_order(const Dendrogram& dend);

/// Simultaneous row/column permutation of the distance matrix.
DistanceMatrix seriate(const DistanceMatrix& d, const std::vector<std::string>& order);

/// Newick serialization; branch length = parent height - child height.
std::string to_newick(const Dendrogram& dend);

}  // namespace epiclust
