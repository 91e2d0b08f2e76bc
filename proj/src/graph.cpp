#include "prvnet/graph.hpp"

#include <stdexcept>
#include <unordered_set>

namespace prvnet {

Tensor& Node::grad() {
  if (grad_store_.empty() && value.numel() > 0) grad_store_ = Tensor(value.shape());
  return grad_store_;
}

void Node::zero_grad() {
  if (!grad_store_.empty()) grad_store_.fill(0.0f);
}

Var::Var(Tensor value) : n_(std::make_shared<Node>()) {
  n_->value = std::move(value);
}

Var::Var(Tensor value, std::vector<Var> parents, std::function<void(Node&)> rule)
    : n_(std::make_shared<Node>()) {
  n_->value = std::move(value);
  n_->parents.reserve(parents.size());
  for (auto& p : parents) n_->parents.push_back(p.node());
  n_->backward_rule = std::move(rule);
}

Var constant(Tensor value) { return Var(std::move(value)); }
Var param(Tensor value) { return Var(std::move(value)); }

void backward(const Var& loss) {
  if (!loss.defined()) throw std::invalid_argument("backward() on undefined Var");
  if (loss.value().numel() != 1)
    throw std::invalid_argument("backward() requires a scalar loss, got shape " +
                                loss.value().shape_str());

  // Iterative post-order DFS; finish order is a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior nodes carry this traversal's gradient only; leaves accumulate
  // across calls, so repeated backward() without zero_grad() adds one full
  // gradient per call.
  for (Node* n : order)
    if (!n->parents.empty()) n->zero_grad();

  loss.node()->grad().at(0) += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    n->grad();  // ensure populated even if no child touched it
    if (n->backward_rule) n->backward_rule(*n);
  }
}

void zero_grad(std::vector<Var>& vars) {
  for (auto& v : vars) v.zero_grad();
}

}  // namespace prvnet
