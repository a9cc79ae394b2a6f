#include "kgfuse/autograd.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kgfuse::ag {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool any_needs(std::initializer_list<Var> vars) {
  for (Var v : vars) {
    if (v->needs_grad()) return true;
  }
  return false;
}

}  // namespace

Parameter::Parameter(std::string n, Matrix init, bool weight_decay)
    : name(std::move(n)), value(std::move(init)), decay(weight_decay) {
  grad = Matrix::Zero(value.rows(), value.cols());
  m = Matrix::Zero(value.rows(), value.cols());
  v = Matrix::Zero(value.rows(), value.cols());
}

void Node::accumulate(const Matrix& g) {
  if (target_ == nullptr) return;
  if (target_->size() == 0) {
    *target_ = g;
  } else {
    *target_ += g;
  }
}

void Node::accumulate_row(Eigen::Index row, const Eigen::RowVectorXd& g) {
  if (target_ == nullptr) return;
  if (target_->size() == 0) target_->setZero(value_->rows(), value_->cols());
  target_->row(row) += g;
}

Var Tape::param(Parameter& p) {
  Node& n = nodes_.emplace_back();
  n.tape_ = this;
  n.value_ = &p.value;
  if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) p.zero_grad();
  n.target_ = &p.grad;
  return &n;
}

Var Tape::constant(Matrix value) {
  Node& n = nodes_.emplace_back();
  n.tape_ = this;
  n.own_ = std::move(value);
  n.value_ = &n.own_;
  return &n;
}

Var Tape::make(Matrix value, bool needs_grad, std::function<void(const Matrix&)> backprop) {
  Node& n = nodes_.emplace_back();
  n.tape_ = this;
  n.own_ = std::move(value);
  n.value_ = &n.own_;
  if (needs_grad) {
    n.target_ = &n.grad_;
    n.backprop_ = std::move(backprop);
  }
  return &n;
}

void Tape::backward(Var root, double scale) {
  require(root->rows() == 1 && root->cols() == 1, "backward: root must be a scalar");
  if (!root->needs_grad()) return;
  root->accumulate(Matrix::Constant(1, 1, scale));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node& n = *it;
    if (!n.backprop_ || n.grad_.size() == 0) continue;
    n.backprop_(n.grad_);
  }
}

Var matmul(Var a, Var b) {
  require(a->cols() == b->rows(), "matmul: shape mismatch");
  return a->tape().make(a->value() * b->value(), any_needs({a, b}), [a, b](const Matrix& g) {
    if (a->needs_grad()) a->accumulate(g * b->value().transpose());
    if (b->needs_grad()) b->accumulate(a->value().transpose() * g);
  });
}

Var matmul_nt(Var a, Var b) {
  require(a->cols() == b->cols(), "matmul_nt: shape mismatch");
  return a->tape().make(a->value() * b->value().transpose(), any_needs({a, b}), [a, b](const Matrix& g) {
    if (a->needs_grad()) a->accumulate(g * b->value());
    if (b->needs_grad()) b->accumulate(g.transpose() * a->value());
  });
}

Var add(Var a, Var b) {
  require(a->rows() == b->rows() && a->cols() == b->cols(), "add: shape mismatch");
  return a->tape().make(a->value() + b->value(), any_needs({a, b}), [a, b](const Matrix& g) {
    a->accumulate(g);
    b->accumulate(g);
  });
}

Var add_row(Var a, Var row) {
  require(row->rows() == 1 && row->cols() == a->cols(), "add_row: shape mismatch");
  Matrix out = a->value().rowwise() + row->value().row(0);
  return a->tape().make(std::move(out), any_needs({a, row}), [a, row](const Matrix& g) {
    a->accumulate(g);
    if (row->needs_grad()) row->accumulate(g.colwise().sum());
  });
}

Var scale(Var a, double s) {
  return a->tape().make(a->value() * s, a->needs_grad(), [a, s](const Matrix& g) { a->accumulate(g * s); });
}

Var add_constant(Var a, const Matrix& c) {
  require(a->rows() == c.rows() && a->cols() == c.cols(), "add_constant: shape mismatch");
  return a->tape().make(a->value() + c, a->needs_grad(), [a](const Matrix& g) { a->accumulate(g); });
}

Var gelu(Var a) {
  static constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  static constexpr double kA = 0.044715;
  const Matrix& x = a->value();
  Matrix t = (kC * (x.array() + kA * x.array().cube())).tanh().matrix();
  Matrix out = (0.5 * x.array() * (1.0 + t.array())).matrix();
  return a->tape().make(std::move(out), a->needs_grad(), [a, t = std::move(t)](const Matrix& g) {
    const auto& x = a->value().array();
    auto d = 0.5 * (1.0 + t.array()) +
             0.5 * x * (1.0 - t.array().square()) * kC * (1.0 + 3.0 * kA * x.square());
    a->accumulate((g.array() * d).matrix());
  });
}

Var tanh(Var a) {
  Matrix out = a->value().array().tanh().matrix();
  Matrix y = out;
  return a->tape().make(std::move(out), a->needs_grad(), [a, y = std::move(y)](const Matrix& g) {
    a->accumulate((g.array() * (1.0 - y.array().square())).matrix());
  });
}

Var layer_norm(Var x, Var gain, Var bias, double eps) {
  const Eigen::Index n = x->cols();
  require(gain->rows() == 1 && gain->cols() == n && bias->rows() == 1 && bias->cols() == n,
          "layer_norm: shape mismatch");
  const Matrix& in = x->value();
  Eigen::VectorXd mean = in.rowwise().mean();
  Matrix centered = in.colwise() - mean;
  Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / static_cast<double>(n)) + eps).rsqrt().matrix();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix out = (xhat.array().rowwise() * gain->value().row(0).array()).matrix();
  out.rowwise() += bias->value().row(0);
  return x->tape().make(std::move(out), any_needs({x, gain, bias}),
                        [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std), n](const Matrix& g) {
                          if (gain->needs_grad()) gain->accumulate((g.array() * xhat.array()).colwise().sum());
                          if (bias->needs_grad()) bias->accumulate(g.colwise().sum());
                          if (!x->needs_grad()) return;
                          Matrix dxhat = g.array().rowwise() * gain->value().row(0).array();
                          Eigen::VectorXd mean_d = dxhat.rowwise().mean();
                          Eigen::VectorXd mean_dx = (dxhat.array() * xhat.array()).rowwise().sum() /
                                                    static_cast<double>(n);
                          Matrix dx = dxhat.colwise() - mean_d;
                          dx -= (xhat.array().colwise() * mean_dx.array()).matrix();
                          dx = dx.array().colwise() * inv_std.array();
                          x->accumulate(dx);
                        });
}

Var softmax_rows(Var a) {
  const Matrix& in = a->value();
  Eigen::VectorXd row_max = in.rowwise().maxCoeff();
  Matrix e = (in.colwise() - row_max).array().exp().matrix();
  Eigen::VectorXd z = e.rowwise().sum();
  Matrix y = e.array().colwise() / z.array();
  Matrix out = y;
  return a->tape().make(std::move(out), a->needs_grad(), [a, y = std::move(y)](const Matrix& g) {
    Eigen::VectorXd dot = (g.array() * y.array()).rowwise().sum();
    a->accumulate((y.array() * (g.colwise() - dot).array()).matrix());
  });
}

Var cols(Var a, Eigen::Index start, Eigen::Index width) {
  require(start >= 0 && start + width <= a->cols(), "cols: out of range");
  Matrix out = a->value().middleCols(start, width);
  return a->tape().make(std::move(out), a->needs_grad(), [a, start, width](const Matrix& g) {
    Matrix full = Matrix::Zero(a->rows(), a->cols());
    full.middleCols(start, width) = g;
    a->accumulate(full);
  });
}

Var concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const Eigen::Index rows = parts.front()->rows();
  Eigen::Index total = 0;
  bool needs = false;
  for (Var p : parts) {
    require(p->rows() == rows, "concat_cols: row mismatch");
    total += p->cols();
    needs = needs || p->needs_grad();
  }
  Matrix out(rows, total);
  Eigen::Index at = 0;
  for (Var p : parts) {
    out.middleCols(at, p->cols()) = p->value();
    at += p->cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front()->tape().make(std::move(out), needs, [inputs](const Matrix& g) {
    Eigen::Index at = 0;
    for (Var p : inputs) {
      if (p->needs_grad()) p->accumulate(g.middleCols(at, p->cols()));
      at += p->cols();
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const Eigen::Index cols = parts.front()->cols();
  Eigen::Index total = 0;
  bool needs = false;
  for (Var p : parts) {
    require(p->cols() == cols, "concat_rows: column mismatch");
    total += p->rows();
    needs = needs || p->needs_grad();
  }
  Matrix out(total, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    out.middleRows(at, p->rows()) = p->value();
    at += p->rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front()->tape().make(std::move(out), needs, [inputs](const Matrix& g) {
    Eigen::Index at = 0;
    for (Var p : inputs) {
      if (p->needs_grad()) p->accumulate(g.middleRows(at, p->rows()));
      at += p->rows();
    }
  });
}

Var gather_rows(Var a, std::span<const int> rows) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), a->cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0) continue;
    require(rows[r] < a->rows(), "gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(r)) = a->value().row(rows[r]);
  }
  std::vector<int> idx(rows.begin(), rows.end());
  return a->tape().make(std::move(out), a->needs_grad(), [a, idx = std::move(idx)](const Matrix& g) {
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (idx[r] >= 0) a->accumulate_row(idx[r], g.row(static_cast<Eigen::Index>(r)));
    }
  });
}

Var sum(std::span<const Var> parts) {
  require(!parts.empty(), "sum: no inputs");
  Matrix out = parts.front()->value();
  bool needs = parts.front()->needs_grad();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    require(parts[i]->rows() == out.rows() && parts[i]->cols() == out.cols(), "sum: shape mismatch");
    out += parts[i]->value();
    needs = needs || parts[i]->needs_grad();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front()->tape().make(std::move(out), needs, [inputs](const Matrix& g) {
    for (Var p : inputs) p->accumulate(g);
  });
}

Var dyadic_rows(Var context, Var graph) {
  require(context->rows() == graph->rows(), "dyadic_rows: row mismatch");
  const Eigen::Index t_len = context->rows();
  const Eigen::Index d = context->cols();
  const Eigen::Index k = graph->cols();
  const Matrix& c = context->value();
  const Matrix& gr = graph->value();
  Matrix out(t_len, d * k + d);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (Eigen::Index i = 0; i < d; ++i) out.row(t).segment(i * k, k) = c(t, i) * gr.row(t);
  }
  out.rightCols(d) = c;
  return context->tape().make(std::move(out), any_needs({context, graph}), [context, graph, d, k](const Matrix& g) {
    const Matrix& c = context->value();
    const Matrix& gr = graph->value();
    const Eigen::Index t_len = c.rows();
    if (context->needs_grad()) {
      Matrix dc = g.rightCols(d);
      for (Eigen::Index t = 0; t < t_len; ++t) {
        for (Eigen::Index i = 0; i < d; ++i) dc(t, i) += g.row(t).segment(i * k, k).dot(gr.row(t));
      }
      context->accumulate(dc);
    }
    if (graph->needs_grad()) {
      Matrix dg = Matrix::Zero(t_len, k);
      for (Eigen::Index t = 0; t < t_len; ++t) {
        for (Eigen::Index i = 0; i < d; ++i) dg.row(t) += c(t, i) * g.row(t).segment(i * k, k);
      }
      graph->accumulate(dg);
    }
  });
}

Var cross_entropy(Var logits, std::span<const int> targets) {
  const Eigen::Index n = logits->rows();
  require(static_cast<std::size_t>(n) == targets.size() && n > 0, "cross_entropy: target count mismatch");
  const Matrix& z = logits->value();
  Eigen::VectorXd row_max = z.rowwise().maxCoeff();
  Matrix p = (z.colwise() - row_max).array().exp().matrix();
  Eigen::VectorXd norm = p.rowwise().sum();
  p = p.array().colwise() / norm.array();
  double loss = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const int t = targets[static_cast<std::size_t>(r)];
    require(t >= 0 && t < z.cols(), "cross_entropy: target out of range");
    loss -= z(r, t) - row_max(r) - std::log(norm(r));
  }
  loss /= static_cast<double>(n);
  std::vector<int> tg(targets.begin(), targets.end());
  return logits->tape().make(Matrix::Constant(1, 1, loss), logits->needs_grad(),
                             [logits, p = std::move(p), tg = std::move(tg)](const Matrix& g) {
                               Matrix d = p;
                               for (std::size_t r = 0; r < tg.size(); ++r) d(static_cast<Eigen::Index>(r), tg[r]) -= 1.0;
                               logits->accumulate(d * (g(0, 0) / static_cast<double>(tg.size())));
                             });
}

Var binary_cross_entropy(Var logits, std::span<const int> labels) {
  const Eigen::Index n = logits->rows();
  require(logits->cols() == 1 && static_cast<std::size_t>(n) == labels.size() && n > 0,
          "binary_cross_entropy: shape mismatch");
  Eigen::VectorXd prob(n);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double z = logits->value()(r, 0);
    const int y = labels[static_cast<std::size_t>(r)];
    // log(1 + exp(-|z|)) + max(z, 0) - y z
    loss += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - y * z;
    prob(r) = 1.0 / (1.0 + std::exp(-z));
  }
  loss /= static_cast<double>(n);
  std::vector<int> lb(labels.begin(), labels.end());
  return logits->tape().make(Matrix::Constant(1, 1, loss), logits->needs_grad(),
                             [logits, prob = std::move(prob), lb = std::move(lb)](const Matrix& g) {
                               Matrix d(prob.size(), 1);
                               for (Eigen::Index r = 0; r < prob.size(); ++r) {
                                 d(r, 0) = (prob(r) - lb[static_cast<std::size_t>(r)]) * g(0, 0) /
                                           static_cast<double>(lb.size());
                               }
                               logits->accumulate(d);
                             });
}

}  // namespace kgfuse::ag
