#pragma once

#include <Eigen/Core>

#include <functional>
#include <utility>
#include <vector>

namespace lsfsac::ad {

using Mat = Eigen::MatrixXd;

class Graph;

// Handle to a node owned by a Graph. Cheap to copy; invalid once the graph dies.
class Var {
public:
  Var() = default;
  Var(Graph* g, int id) : g_(g), id_(id) {}

  const Mat& val() const;
  const Mat& grad() const;  // zero-sized until backward touches this node
  bool defined() const { return g_ != nullptr; }
  int id() const { return id_; }
  Graph* graph() const { return g_; }
  Eigen::Index rows() const;
  Eigen::Index cols() const;

private:
  Graph* g_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are appended in topological order; backward walks
// the tape in reverse. One graph per loss evaluation.
class Graph {
public:
  struct Node {
    Mat value;
    Mat grad;  // lazily sized
    bool requires_grad = false;
    std::function<void(Graph&, const Mat&)> backprop;  // routes upstream grad to parents
  };

  Var leaf(Mat value, bool requires_grad);
  Var constant(Mat value) { return leaf(std::move(value), false); }
  Var constant(double v);

  Var make(Mat value, bool requires_grad, std::function<void(Graph&, const Mat&)> backprop);

  // Seeds d(root)/d(root) = 1 and propagates. root must be 1x1.
  void backward(const Var& root);

  void accumulate(int id, const Mat& g);
  Node& node(int id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  size_t size() const { return nodes_.size(); }

private:
  std::vector<Node> nodes_;
};

// ---- primitive ops ----

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var neg(Var a);
Var matmul(Var a, Var b);

// broadcast: X (RxC) op vec
Var add_rowvec(Var x, Var row);  // row: 1xC
Var mul_colvec(Var x, Var col);  // col: Rx1, replicated across columns
Var mul_rowvec(Var x, Var row);

Var tanh_(Var a);
Var sigmoid(Var a);
Var relu(Var a);
Var elu(Var a);
Var abs_(Var a);
Var exp_(Var a);
Var log_(Var a);
Var square(Var a);
Var cmin(Var a, Var b);

Var sum(Var a);        // -> 1x1
Var mean(Var a);       // -> 1x1
Var sum_cols(Var a);   // RxC -> Rx1
Var sum_rows(Var a);   // RxC -> 1xC

Var hcat(Var a, Var b);
Var block(Var a, Eigen::Index i0, Eigen::Index j0, Eigen::Index r, Eigen::Index c);
// rows start, start+stride, ..., count of them
Var rows_strided(Var a, Eigen::Index start, Eigen::Index stride, Eigen::Index count);
// each row repeated k times consecutively
Var repeat_rows(Var a, Eigen::Index k);

Var detach(Var a);

// Row-wise log-softmax restricted to mask-true entries (mask is 0/1).
// Masked columns hold finite garbage; multiply by the mask before use.
Var masked_log_softmax(Var logits, const Mat& mask);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

}  // namespace lsfsac::ad
