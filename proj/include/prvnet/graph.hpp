#pragma once

#include "prvnet/tensor.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace prvnet {

// Reverse-mode autodiff over f32 tensors.
//
// A graph node owns its forward value, a lazily materialized gradient of the
// same shape, its parent edges, and a backward rule that reads this node's
// gradient and accumulates (never overwrites) into the parents' gradients.
// backward(loss) resets interior gradients, seeds d(loss)/d(loss) = 1, and
// walks the graph once in reverse topological order; leaf gradients
// accumulate across calls, so calling backward twice without zero_grad
// doubles every leaf gradient. Graphs are built per step and freed when the
// last Var handle goes out of scope; parameter leaves live across steps
// because the caller keeps handles to them. Single-threaded by design: one
// graph must not be mutated from two threads.

struct Node {
  Tensor value;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_rule;  // empty for leaves

  Tensor& grad();  // materializes zeros of value's shape on first access
  bool grad_materialized() const { return !grad_store_.empty() || value.numel() == 0; }
  void zero_grad();

 private:
  Tensor grad_store_;
};

using NodePtr = std::shared_ptr<Node>;

// Value-semantic handle to a graph node (cheap to copy, shared ownership).
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value);  // leaf
  Var(Tensor value, std::vector<Var> parents, std::function<void(Node&)> rule);

  bool defined() const { return static_cast<bool>(n_); }
  const Tensor& value() const { return n_->value; }
  Tensor& value() { return n_->value; }
  Tensor& grad() const { return n_->grad(); }
  void zero_grad() const { n_->zero_grad(); }
  const std::vector<int>& shape() const { return n_->value.shape(); }
  NodePtr node() const { return n_; }

 private:
  NodePtr n_;
};

// Leaf constructors: same mechanics, two names so call sites read honestly.
Var constant(Tensor value);
Var param(Tensor value);

// Seeds unit gradient at `loss` (must be scalar) and back-propagates through
// every reachable node. Throws std::invalid_argument on non-scalar loss.
void backward(const Var& loss);

void zero_grad(std::vector<Var>& vars);

}  // namespace prvnet
