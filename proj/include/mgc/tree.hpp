#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mgc {

/// Binary decision tree node. feature < 0 marks a leaf; internal nodes route
/// x[feature] <= threshold to `left`, otherwise `right`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0; // leaf payload: class index (forest) or step (boosting)

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    double predict(const double* x) const {
        std::size_t i = 0;
        while (!nodes[i].is_leaf())
            i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }

    std::size_t internal_node_count() const {
        std::size_t count = 0;
        for (const TreeNode& n : nodes)
            if (!n.is_leaf())
                ++count;
        return count;
    }
};

} // namespace mgc
