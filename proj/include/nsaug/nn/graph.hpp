#pragma once

#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "nsaug/nn/tensor.hpp"

namespace nsaug::nn {

// One vertex of a dynamically built computation graph. Ops allocate a node,
// fill `value`, record parents, and set `backward_fn` to push `grad` into the
// parents. Graphs are rebuilt every step and freed with the last shared_ptr.
template <typename T>
struct Node {
    Tensor<T> value;
    Tensor<T> grad;  // allocated on demand, same shape as value
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void()> backward_fn;

    explicit Node(Tensor<T> v, bool rg = false) : value(std::move(v)), requires_grad(rg) {}

    void ensure_grad() {
        if (grad.data.empty()) grad = Tensor<T>(value.shape);
    }
    void zero_grad() {
        for (T& g : grad.data) g = T(0);
    }
};

template <typename T>
using NodeP = std::shared_ptr<Node<T>>;

template <typename T>
NodeP<T> make_leaf(Tensor<T> value, bool requires_grad = false) {
    return std::make_shared<Node<T>>(std::move(value), requires_grad);
}

// Reverse-mode sweep from a scalar root: topological order by depth-first
// walk, seed d(root)/d(root) = 1, then run each node's backward_fn.
template <typename T>
void backward(const NodeP<T>& root) {
    if (root->value.numel() != 1)
        throw ValidationError("backward: root must be a scalar");

    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> visited;
    std::vector<std::pair<Node<T>*, size_t>> stack;
    stack.push_back({root.get(), 0});
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node<T>* parent = node->parents[next].get();
            ++next;
            if (visited.insert(parent).second) stack.push_back({parent, 0});
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (Node<T>* n : order) {
        n->ensure_grad();
        n->zero_grad();
    }
    root->grad.data[0] = T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backward_fn) (*it)->backward_fn();
    }
}

}  // namespace nsaug::nn
