#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "shortclass/classic.hpp"
#include "shortclass/common.hpp"

namespace shortclass::classic {

int DecisionTree::predict(const kernels::SparseRow& row) const {
    int node = 0;
    while (true) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        if (n.feature < 0) return n.leaf_label;
        double v = 0.0;
        auto it = std::lower_bound(row.begin(), row.end(),
                                   std::make_pair(static_cast<std::uint32_t>(n.feature), 0.0),
                                   [](const auto& a, const auto& b) { return a.first < b.first; });
        if (it != row.end() && it->first == static_cast<std::uint32_t>(n.feature)) v = it->second;
        node = v < n.threshold ? n.left : n.right;
    }
}

namespace {

// Column-sparse view: per feature, (row, value) entries sorted by row.
using CscColumn = std::vector<std::pair<std::uint32_t, double>>;

// The split scan walks only a column's nonzero entries; zero-valued samples
// enter as one implicit group placed between negative and positive values.
struct TreeBuilder {
    const std::vector<CscColumn>& columns;
    const std::vector<int>& y;
    std::size_t mtry;
    std::size_t max_depth;  // 0 = unlimited
    Rng rng;
    DecisionTree tree;
    std::vector<std::uint32_t> feature_pool;

    // Multiplicity of each dataset row inside the current node (bootstrap
    // may repeat rows); stamped per node so no O(n) clear is needed.
    std::vector<std::uint32_t> stamp;
    std::vector<std::uint32_t> mult;
    std::uint32_t mark = 0;

    struct ValueGroup {
        double value;
        std::size_t count = 0;
        std::size_t pos = 0;
    };
    std::vector<ValueGroup> scratch;

    TreeBuilder(const std::vector<CscColumn>& cols, const std::vector<int>& labels,
                std::size_t n_rows, std::size_t mtry_, std::size_t max_depth_,
                std::uint64_t seed)
        : columns(cols), y(labels), mtry(mtry_), max_depth(max_depth_), rng(seed) {
        feature_pool.resize(columns.size());
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
        stamp.assign(n_rows, 0);
        mult.assign(n_rows, 0);
    }

    static double gini(std::size_t pos, std::size_t total) {
        if (total == 0) return 0.0;
        double p = static_cast<double>(pos) / static_cast<double>(total);
        return 1.0 - p * p - (1.0 - p) * (1.0 - p);
    }

    int build(std::vector<std::uint32_t>& samples, std::size_t depth) {
        const std::size_t n = samples.size();
        std::size_t pos = 0;
        for (std::uint32_t r : samples) pos += (y[r] == 1);

        auto make_leaf = [&]() {
            TreeNode leaf;
            leaf.feature = -1;
            leaf.leaf_label = 2 * pos > n ? 1 : 0;  // tie -> negative class
            tree.nodes.push_back(leaf);
            return static_cast<int>(tree.nodes.size()) - 1;
        };

        if (pos == 0 || pos == n) return make_leaf();
        if (max_depth > 0 && depth >= max_depth) return make_leaf();

        ++mark;
        for (std::uint32_t r : samples) {
            if (stamp[r] != mark) {
                stamp[r] = mark;
                mult[r] = 0;
            }
            ++mult[r];
        }

        // Sample mtry candidate features without replacement.
        for (std::size_t i = 0; i < mtry; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, feature_pool.size() - 1);
            std::swap(feature_pool[i], feature_pool[pick(rng)]);
        }

        const double parent_gini = gini(pos, n);
        double best_gain = 1e-12;
        std::int32_t best_feature = -1;
        double best_threshold = 0.0;

        for (std::size_t c = 0; c < mtry; ++c) {
            const std::uint32_t f = feature_pool[c];
            scratch.clear();
            std::size_t nz_count = 0, nz_pos = 0;
            for (const auto& [r, v] : columns[f]) {
                if (stamp[r] != mark) continue;
                std::size_t cnt = mult[r];
                std::size_t p = y[r] == 1 ? cnt : 0;
                scratch.push_back({v, cnt, p});
                nz_count += cnt;
                nz_pos += p;
            }
            if (nz_count == 0) continue;  // feature constant (all zero) in node
            std::sort(scratch.begin(), scratch.end(),
                      [](const ValueGroup& a, const ValueGroup& b) { return a.value < b.value; });

            // merge equal values and splice in the implicit zero group
            std::vector<ValueGroup> groups;
            bool zero_placed = nz_count == n;
            ValueGroup zero{0.0, n - nz_count, pos - nz_pos};
            for (const auto& g : scratch) {
                if (!zero_placed && g.value > 0.0) {
                    groups.push_back(zero);
                    zero_placed = true;
                }
                if (!groups.empty() && groups.back().value == g.value) {
                    groups.back().count += g.count;
                    groups.back().pos += g.pos;
                } else {
                    groups.push_back(g);
                }
            }
            if (!zero_placed) groups.push_back(zero);
            if (groups.size() < 2) continue;

            std::size_t left_n = 0, left_pos = 0;
            for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
                left_n += groups[g].count;
                left_pos += groups[g].pos;
                double threshold = 0.5 * (groups[g].value + groups[g + 1].value);
                std::size_t right_n = n - left_n;
                std::size_t right_pos = pos - left_pos;
                double child = (static_cast<double>(left_n) * gini(left_pos, left_n) +
                                static_cast<double>(right_n) * gini(right_pos, right_n)) /
                               static_cast<double>(n);
                double gain = parent_gini - child;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<std::int32_t>(f);
                    best_threshold = threshold;
                }
            }
        }

        if (best_feature < 0) return make_leaf();

        // node values of the winning feature, for the partition
        std::unordered_map<std::uint32_t, double> values;
        for (const auto& [r, v] : columns[static_cast<std::size_t>(best_feature)])
            if (stamp[r] == mark) values.emplace(r, v);

        std::vector<std::uint32_t> left, right;
        for (std::uint32_t r : samples) {
            auto it = values.find(r);
            double v = it == values.end() ? 0.0 : it->second;
            (v < best_threshold ? left : right).push_back(r);
        }
        samples.clear();
        samples.shrink_to_fit();

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        tree.nodes.push_back(node);
        int self = static_cast<int>(tree.nodes.size()) - 1;
        int l = build(left, depth + 1);
        int r = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(self)].left = l;
        tree.nodes[static_cast<std::size_t>(self)].right = r;
        return self;
    }
};

}  // namespace

std::vector<double> RandomForestModel::decision_scores(const FeatureMatrix& x) const {
    std::vector<double> out(x.n_rows());
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(x.n_rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        std::size_t votes = 0;
        for (const auto& tree : trees_) votes += (tree.predict(x.rows[i]) == 1);
        out[i] = static_cast<double>(votes) / static_cast<double>(trees_.size());
    }
    return out;
}

std::unique_ptr<RandomForestModel> train_random_forest(const FeatureMatrix& x,
                                                       const std::vector<int>& y,
                                                       const RandomForestConfig& config) {
    if (x.n_rows() != y.size()) throw DataError("train_random_forest: X rows != |y|");
    if (x.n_rows() == 0) throw DataError("train_random_forest: empty training set");
    if (config.n_trees == 0) throw DataError("train_random_forest: n_trees must be >= 1");

    const std::size_t n = x.n_rows();
    const std::size_t m = x.n_cols;

    std::vector<CscColumn> columns(m);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, v] : x.rows[i])
            if (v != 0.0) columns[j].emplace_back(static_cast<std::uint32_t>(i), v);

    std::size_t mtry = config.max_features;
    if (mtry == 0) mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
    mtry = std::min(mtry, m);

    std::vector<DecisionTree> trees(config.n_trees);
#pragma omp parallel for schedule(dynamic)
    for (long long tt = 0; tt < static_cast<long long>(config.n_trees); ++tt) {
        const auto t = static_cast<std::size_t>(tt);
        const std::uint64_t tree_seed = derive_seed(config.seed, 0xf0e0 + t);
        Rng boot_rng(tree_seed);
        std::vector<std::uint32_t> samples(n);
        if (config.bootstrap) {
            std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
            for (auto& s : samples) s = pick(boot_rng);
        } else {
            std::iota(samples.begin(), samples.end(), 0);
        }
        TreeBuilder builder(columns, y, n, mtry, config.max_depth,
                            derive_seed(tree_seed, 0x7ee));
        builder.build(samples, 0);
        trees[t] = std::move(builder.tree);
    }

    FeatureKind fk = x.rep == Representation::tfidf ? FeatureKind::tfidf : FeatureKind::counts;
    return std::make_unique<RandomForestModel>(std::move(trees), m, fk);
}

}  // namespace shortclass::classic
