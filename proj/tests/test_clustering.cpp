#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "epiclust/clustering.hpp"
#include "test_util.hpp"

using namespace epiclust;
using namespace epiclust::test;

namespace {

std::vector<std::string> labels_n(int n) {
    std::vector<std::string> v;
    for (int i = 0; i < n; ++i) v.push_back("P" + std::to_string(i));
    return v;
}

DistanceMatrix dm(const Matrix& values, std::vector<std::string> labels = {}) {
    DistanceMatrix d;
    d.labels = labels.empty() ? labels_n(static_cast<int>(values.rows())) : std::move(labels);
    d.values = values;
    return d;
}

Matrix random_points(std::mt19937& rng, int n, int dims) {
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    Matrix m(n, dims);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dims; ++j) m(i, j) = u(rng);
    return m;
}

// from-scratch complete linkage recomputing cluster distances as the max over
// the original pairwise distances; same tie-break as the implementation
struct OracleStep {
    std::set<int> merged;  // leaf indices of the new cluster
    double height;
};

std::vector<OracleStep> complete_linkage_oracle(const Matrix& d) {
    const int n = static_cast<int>(d.rows());
    std::vector<std::set<int>> clusters;
    for (int i = 0; i < n; ++i) clusters.push_back({i});

    auto cluster_dist = [&](const std::set<int>& a, const std::set<int>& b) {
        double m = 0;
        for (int x : a)
            for (int y : b) m = std::max(m, d(x, y));
        return m;
    };

    std::vector<OracleStep> steps;
    while (clusters.size() > 1) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                double v = cluster_dist(clusters[i], clusters[j]);
                auto key = std::minmax(*clusters[i].begin(), *clusters[j].begin());
                auto cur = std::minmax(*clusters[bi].begin(), *clusters[bj].begin());
                if (v < best || (v == best && key < cur)) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        std::set<int> merged = clusters[bi];
        merged.insert(clusters[bj].begin(), clusters[bj].end());
        steps.push_back({merged, best});
        clusters.erase(clusters.begin() + static_cast<long>(bj));
        clusters[bi] = merged;
    }
    return steps;
}

// leaf index sets of each dendrogram node
std::vector<std::set<int>> node_members(const Dendrogram& dend) {
    const int n = static_cast<int>(dend.leaves.size());
    std::vector<std::set<int>> sets(2 * n - 1);
    for (int i = 0; i < n; ++i) sets[i] = {i};
    for (std::size_t k = 0; k < dend.merges.size(); ++k) {
        sets[n + k] = sets[dend.merges[k].left];
        sets[n + k].insert(sets[dend.merges[k].right].begin(),
                           sets[dend.merges[k].right].end());
    }
    return sets;
}

// partition as sets of label sets, for representation-independent comparison
std::set<std::set<std::string>> partition_of(const ClusterAssignment& a) {
    std::map<int, std::set<std::string>> by_id;
    for (const auto& [label, id] : a.cluster_of) by_id[id].insert(label);
    std::set<std::set<std::string>> out;
    for (auto& [id, members] : by_id) out.insert(members);
    return out;
}

}  // namespace

TEST_CASE("pairwise_euclidean basics") {
    Matrix pts(2, 2);
    pts << 0, 0, 1, 1;
    auto d = pairwise_euclidean(labels_n(2), pts);
    CHECK(d.values(0, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(d.values(1, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(d.values(0, 0) == 0.0);

    std::mt19937 rng(3);
    Matrix x = random_points(rng, 12, 4);
    auto big = pairwise_euclidean(labels_n(12), x);
    big.validate();
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            for (int k = 0; k < 12; ++k)
                CHECK(big.values(i, j) <= big.values(i, k) + big.values(k, j) + 1e-12);
}

TEST_CASE("two points merge at their distance") {
    Matrix d(2, 2);
    d << 0, 5, 5, 0;
    auto dend = agglomerate(dm(d));
    REQUIRE(dend.merges.size() == 1);
    CHECK(dend.merges[0].height == 5.0);
    CHECK(dend.merges[0].left == 0);
    CHECK(dend.merges[0].right == 1);
    CHECK(dend.merges[0].size == 2);
}

TEST_CASE("collinear 0, 1, 10 traces the expected complete-linkage merges") {
    Matrix pts(3, 1);
    pts << 0, 1, 10;
    auto dend = agglomerate(pairwise_euclidean(labels_n(3), pts));
    REQUIRE(dend.merges.size() == 2);
    CHECK(dend.merges[0].height == doctest::Approx(1.0));
    CHECK(dend.merges[0].left == 0);
    CHECK(dend.merges[0].right == 1);
    CHECK(dend.merges[1].height == doctest::Approx(10.0));  // max(9, 10)
    CHECK(dend.merges[1].left == 3);
    CHECK(dend.merges[1].right == 2);
}

TEST_CASE("complete linkage matches a from-scratch oracle on random instances") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 3 + static_cast<int>(rng() % 8);
        auto d = pairwise_euclidean(labels_n(n), random_points(rng, n, 3));
        auto dend = agglomerate(d);
        auto oracle = complete_linkage_oracle(d.values);
        auto members = node_members(dend);
        REQUIRE(dend.merges.size() == oracle.size());
        for (std::size_t k = 0; k < oracle.size(); ++k) {
            CHECK(dend.merges[k].height == doctest::Approx(oracle[k].height).epsilon(1e-12));
            CHECK(members[n + k] == oracle[k].merged);
        }
    }
}

TEST_CASE("complete-linkage merge heights are nondecreasing") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 4 + static_cast<int>(rng() % 10);
        auto dend = agglomerate(pairwise_euclidean(labels_n(n), random_points(rng, n, 2)));
        for (std::size_t k = 1; k < dend.merges.size(); ++k)
            CHECK(dend.merges[k].height >= dend.merges[k - 1].height);
    }
}

TEST_CASE("ties break toward the lowest original leaf indices, deterministically") {
    // unit square: four edges at distance 1, diagonals sqrt(2)
    Matrix pts(4, 2);
    pts << 0, 0, 1, 0, 1, 1, 0, 1;
    auto d = pairwise_euclidean(labels_n(4), pts);
    auto a = agglomerate(d);
    auto b = agglomerate(d);
    REQUIRE(a.merges.size() == b.merges.size());
    for (std::size_t k = 0; k < a.merges.size(); ++k) {
        CHECK(a.merges[k].left == b.merges[k].left);
        CHECK(a.merges[k].right == b.merges[k].right);
        CHECK(a.merges[k].height == b.merges[k].height);
    }
    CHECK(a.merges[0].left == 0);
    CHECK(a.merges[0].right == 1);  // pair (0,1) wins the four-way tie
    CHECK(a.merges[1].left == 2);
    CHECK(a.merges[1].right == 3);
}

TEST_CASE("cut: boundaries, singleton and whole-set limits, id order") {
    Matrix pts(4, 1);
    pts << 0, 1, 5, 6;
    auto dend = agglomerate(pairwise_euclidean(labels_n(4), pts));

    auto all_single = cut(dend, 0.5);
    CHECK(all_single.num_clusters == 4);

    auto at_first = cut(dend, 1.0);  // inclusive boundary
    CHECK(at_first.num_clusters == 2);

    auto everything = cut(dend, 100.0);
    CHECK(everything.num_clusters == 1);
    CHECK(everything.cluster_of.at("P0") == 1);

    // ids follow leaf order of first appearance, starting at 1
    auto two = cut(dend, 1.0);
    auto order = leaf_order(dend);
    CHECK(two.cluster_of.at(order.front()) == 1);
    std::set<int> ids;
    for (const auto& [label, id] : two.cluster_of) ids.insert(id);
    CHECK(ids == std::set<int>{1, 2});

    CHECK_THROWS_AS(cut(dend, -1.0), InputError);
}

TEST_CASE("leaf_order is a permutation and clusters are contiguous in it") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 5 + static_cast<int>(rng() % 8);
        auto d = pairwise_euclidean(labels_n(n), random_points(rng, n, 3));
        auto dend = agglomerate(d);
        auto order = leaf_order(dend);

        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        auto expected = labels_n(n);
        std::sort(expected.begin(), expected.end());
        CHECK(sorted == expected);

        double h = dend.merges[n / 2].height;
        auto assignment = cut(dend, h);
        std::set<int> seen;
        int prev = -1;
        for (const auto& label : order) {
            int id = assignment.cluster_of.at(label);
            if (id != prev) {
                CHECK(seen.count(id) == 0);  // each cluster forms one block
                seen.insert(id);
                prev = id;
            }
        }
    }
}

TEST_CASE("clustering is equivariant under input permutation") {
    std::mt19937 rng(37);
    const int n = 9;
    Matrix pts = random_points(rng, n, 3);
    auto labels = labels_n(n);
    auto base = cut(agglomerate(pairwise_euclidean(labels, pts)), 3.0);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix shuffled(n, 3);
    std::vector<std::string> shuffled_labels;
    for (int i = 0; i < n; ++i) {
        shuffled.row(i) = pts.row(perm[i]);
        shuffled_labels.push_back(labels[perm[i]]);
    }
    auto permuted = cut(agglomerate(pairwise_euclidean(shuffled_labels, shuffled)), 3.0);
    CHECK(partition_of(base) == partition_of(permuted));
}

TEST_CASE("seriate: identity, permutation round trip, validation") {
    std::mt19937 rng(41);
    auto d = pairwise_euclidean(labels_n(5), random_points(rng, 5, 2));

    auto same = seriate(d, d.labels);
    CHECK(same.values.isApprox(d.values));

    std::vector<std::string> order{"P3", "P0", "P4", "P1", "P2"};
    auto s = seriate(d, order);
    CHECK(s.labels == order);
    s.validate();
    CHECK(s.values(0, 1) == d.values(3, 0));
    CHECK(s.values(2, 4) == d.values(4, 2));
    // permuting back restores the original
    auto back = seriate(s, d.labels);
    CHECK(back.values.isApprox(d.values));

    CHECK_THROWS_AS(seriate(d, {"P0", "P1"}), InputError);
    CHECK_THROWS_AS(seriate(d, {"P0", "P1", "P2", "P3", "XX"}), InputError);
    CHECK_THROWS_AS(seriate(d, {"P0", "P0", "P2", "P3", "P4"}), InputError);
}

TEST_CASE("newick output is well formed with additive branch lengths") {
    Matrix pts(3, 1);
    pts << 0, 1, 10;
    auto dend = agglomerate(pairwise_euclidean(labels_n(3), pts));
    std::string nw = to_newick(dend);
    CHECK(nw == "((P0:1,P1:1):9,P2:10);");

    std::mt19937 rng(47);
    auto big = agglomerate(pairwise_euclidean(labels_n(8), random_points(rng, 8, 2)));
    std::string s = to_newick(big);
    CHECK(std::count(s.begin(), s.end(), '(') == std::count(s.begin(), s.end(), ')'));
    CHECK(s.back() == ';');
    for (const auto& leaf : big.leaves) CHECK(s.find(leaf) != std::string::npos);
}

TEST_CASE("alternative linkages behave as expected on a simple chain") {
    Matrix pts(3, 1);
    pts << 0, 1, 10;
    auto d = pairwise_euclidean(labels_n(3), pts);
    auto single = agglomerate(d, Linkage::Single);
    CHECK(single.merges[1].height == doctest::Approx(9.0));  // min(9, 10)
    auto avg = agglomerate(d, Linkage::Average);
    CHECK(avg.merges[1].height == doctest::Approx(9.5));

    CHECK(linkage_from_name("complete") == Linkage::Complete);
    CHECK(linkage_from_name(linkage_name(Linkage::Ward)) == Linkage::Ward);
    CHECK_THROWS_AS(linkage_from_name("median"), InputError);
}

TEST_CASE("distance matrix validation catches malformed inputs") {
    Matrix bad(2, 2);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS(dm(bad).validate(), InputError);  // asymmetric

    Matrix diag(2, 2);
    diag << 1, 2, 2, 0;
    CHECK_THROWS_AS(dm(diag).validate(), InputError);  // nonzero diagonal

    Matrix neg(2, 2);
    neg << 0, -1, -1, 0;
    CHECK_THROWS_AS(dm(neg).validate(), InputError);
}
