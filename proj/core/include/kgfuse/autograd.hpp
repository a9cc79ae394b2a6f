#pragma once

// Minimal reverse-mode differentiation over dense double matrices. A Tape
// owns the nodes of one forward pass; Parameters outlive tapes and receive
// accumulated gradients on backward().

#include <Eigen/Dense>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kgfuse::ag {

using Matrix = Eigen::MatrixXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  // Decoupled weight decay applies to this block.
  bool decay = true;
  // Adam moments.
  Matrix m;
  Matrix v;

  Parameter() = default;
  Parameter(std::string n, Matrix init, bool weight_decay = true);
  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

class Node {
 public:
  const Matrix& value() const { return *value_; }
  Eigen::Index rows() const { return value_->rows(); }
  Eigen::Index cols() const { return value_->cols(); }
  bool needs_grad() const { return target_ != nullptr; }
  Tape& tape() const { return *tape_; }

  void accumulate(const Matrix& g);
  void accumulate_row(Eigen::Index row, const Eigen::RowVectorXd& g);

 private:
  friend class Tape;

  Tape* tape_ = nullptr;
  Matrix own_;
  const Matrix* value_ = nullptr;
  Matrix grad_;
  Matrix* target_ = nullptr;
  std::function<void(const Matrix&)> backprop_;
};

using Var = Node*;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf bound to a parameter; gradients accumulate into p.grad.
  Var param(Parameter& p);
  Var constant(Matrix value);
  // Result node. `backprop` receives dL/d(result) and is only called when
  // some input needs a gradient.
  Var make(Matrix value, bool needs_grad, std::function<void(const Matrix&)> backprop);

  // Seeds d(root)/d(root) = scale (root must be 1x1) and runs in reverse.
  void backward(Var root, double scale = 1.0);

  std::size_t size() const { return nodes_.size(); }

 private:
  std::deque<Node> nodes_;
};

Var matmul(Var a, Var b);
// a * b^T
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
// Adds a 1 x n row to every row of a.
Var add_row(Var a, Var row);
Var scale(Var a, double s);
// a + constant (e.g. an additive attention mask); no gradient to the constant.
Var add_constant(Var a, const Matrix& c);
Var gelu(Var a);
Var tanh(Var a);
// Row-wise normalization with 1 x n gain and bias.
Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
Var softmax_rows(Var a);
Var cols(Var a, Eigen::Index start, Eigen::Index width);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
// Row r of the result is row rows[r] of a, or zeros when rows[r] < 0.
Var gather_rows(Var a, std::span<const int> rows);
Var sum(std::span<const Var> parts);
// Per row t: [flatten(ctx_t^T graph_t) row-major, ctx_t]; width 31 d for
// graph width 30.
Var dyadic_rows(Var context, Var graph);
// Mean softmax cross-entropy of logits rows against class targets.
Var cross_entropy(Var logits, std::span<const int> targets);
// Mean binary cross-entropy of n x 1 logits against {0,1} labels.
Var binary_cross_entropy(Var logits, std::span<const int> labels);

}  // namespace kgfuse::ag
