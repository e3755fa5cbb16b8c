#include "lsfsac/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lsfsac::ad {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("autodiff: " + what);
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
              std::to_string(b.cols()));
}

bool needs_grad(const Graph& g, const Var& v) { return g.node(v.id()).requires_grad; }

}  // namespace

const Mat& Var::val() const { return g_->node(id_).value; }
const Mat& Var::grad() const { return g_->node(id_).grad; }
Eigen::Index Var::rows() const { return val().rows(); }
Eigen::Index Var::cols() const { return val().cols(); }

Var Graph::leaf(Mat value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::constant(double v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return leaf(std::move(m), false);
}

Var Graph::make(Mat value, bool requires_grad, std::function<void(Graph&, const Mat&)> backprop) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Graph::accumulate(int id, const Mat& g) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0)
    n.grad = g;
  else
    n.grad += g;
}

void Graph::backward(const Var& root) {
  require(root.rows() == 1 && root.cols() == 1, "backward: root must be scalar");
  Node& r = nodes_[static_cast<size_t>(root.id())];
  require(r.requires_grad, "backward: root does not require grad");
  if (r.grad.size() == 0) r.grad = Mat::Zero(1, 1);
  r.grad(0, 0) += 1.0;
  for (int i = root.id(); i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (!n.requires_grad || n.grad.size() == 0 || !n.backprop) continue;
    n.backprop(*this, n.grad);
  }
}

// ---- ops ----

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Graph& g = *a.graph();
  bool rg = needs_grad(g, a) || needs_grad(g, b);
  int pa = a.id(), pb = b.id();
  return g.make(a.val() + b.val(), rg, [pa, pb](Graph& gr, const Mat& up) {
    gr.accumulate(pa, up);
    gr.accumulate(pb, up);
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Graph& g = *a.graph();
  bool rg = needs_grad(g, a) || needs_grad(g, b);
  int pa = a.id(), pb = b.id();
  return g.make(a.val() - b.val(), rg, [pa, pb](Graph& gr, const Mat& up) {
    gr.accumulate(pa, up);
    gr.accumulate(pb, -up);
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Graph& g = *a.graph();
  bool rg = needs_grad(g, a) || needs_grad(g, b);
  int pa = a.id(), pb = b.id();
  return g.make(a.val().cwiseProduct(b.val()), rg, [pa, pb](Graph& gr, const Mat& up) {
    gr.accumulate(pa, up.cwiseProduct(gr.node(pb).value));
    gr.accumulate(pb, up.cwiseProduct(gr.node(pa).value));
  });
}

Var scale(Var a, double s) {
  Graph& g = *a.graph();
  int pa = a.id();
  return g.make(a.val() * s, needs_grad(g, a),
                [pa, s](Graph& gr, const Mat& up) { gr.accumulate(pa, up * s); });
}

Var add_scalar(Var a, double s) {
  Graph& g = *a.graph();
  int pa = a.id();
  return g.make(a.val().array() + s, needs_grad(g, a),
                [pa](Graph& gr, const Mat& up) { gr.accumulate(pa, up); });
}

Var neg(Var a) { return scale(a, -1.0); }

Var matmul(Var a, Var b) {
  require(a.cols() == b.rows(), "matmul: inner dims");
  Graph& g = *a.graph();
  bool rg = needs_grad(g, a) || needs_grad(g, b);
  int pa = a.id(), pb = b.id();
  return g.make(a.val() * b.val(), rg, [pa, pb](Graph& gr, const Mat& up) {
    gr.accumulate(pa, up * gr.node(pb).value.transpose());
    gr.accumulate(pb, gr.node(pa).value.transpose() * up);
  });
}

Var add_rowvec(Var x, Var row) {
  require(row.rows() == 1 && row.cols() == x.cols(), "add_rowvec: row must be 1xC");
  Graph& g = *x.graph();
  bool rg = needs_grad(g, x) || needs_grad(g, row);
  int px = x.id(), pr = row.id();
  Mat v = x.val();
  v.rowwise() += row.val().row(0);
  return g.make(std::move(v), rg, [px, pr](Graph& gr, const Mat& up) {
    gr.accumulate(px, up);
    gr.accumulate(pr, up.colwise().sum());
  });
}

Var mul_colvec(Var x, Var col) {
  require(col.cols() == 1 && col.rows() == x.rows(), "mul_colvec: col must be Rx1");
  Graph& g = *x.graph();
  bool rg = needs_grad(g, x) || needs_grad(g, col);
  int px = x.id(), pc = col.id();
  Mat v = x.val().array().colwise() * col.val().col(0).array();
  return g.make(std::move(v), rg, [px, pc](Graph& gr, const Mat& up) {
    gr.accumulate(px, up.array().colwise() * gr.node(pc).value.col(0).array());
    gr.accumulate(pc, up.cwiseProduct(gr.node(px).value).rowwise().sum());
  });
}

Var mul_rowvec(Var x, Var row) {
  require(row.rows() == 1 && row.cols() == x.cols(), "mul_rowvec: row must be 1xC");
  Graph& g = *x.graph();
  bool rg = needs_grad(g, x) || needs_grad(g, row);
  int px = x.id(), pr = row.id();
  Mat v = x.val().array().rowwise() * row.val().row(0).array();
  return g.make(std::move(v), rg, [px, pr](Graph& gr, const Mat& up) {
    gr.accumulate(px, up.array().rowwise() * gr.node(pr).value.row(0).array());
    gr.accumulate(pr, up.cwiseProduct(gr.node(px).value).colwise().sum());
  });
}

Var tanh_(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y = a.val().array().tanh();
  return g.make(y, needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    // read own value back through the tape is not possible; recompute from parent
    const Mat t = gr.node(pa).value.array().tanh();
    gr.accumulate(pa, up.cwiseProduct((1.0 - t.array().square()).matrix()));
  });
}

Var sigmoid(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y = (1.0 / (1.0 + (-a.val().array()).exp()));
  return g.make(y, needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    Eigen::ArrayXXd s = 1.0 / (1.0 + (-gr.node(pa).value.array()).exp());
    gr.accumulate(pa, up.cwiseProduct((s * (1.0 - s)).matrix()));
  });
}

Var relu(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  return g.make(a.val().cwiseMax(0.0), needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    Mat m = (gr.node(pa).value.array() > 0.0).cast<double>();
    gr.accumulate(pa, up.cwiseProduct(m));
  });
}

Var elu(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  Eigen::ArrayXXd x = a.val().array();
  Mat y = (x > 0.0).select(x, x.exp() - 1.0);
  return g.make(y, needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    Eigen::ArrayXXd x = gr.node(pa).value.array();
    Mat d = (x > 0.0).select(Eigen::ArrayXXd::Ones(x.rows(), x.cols()), x.exp());
    gr.accumulate(pa, up.cwiseProduct(d));
  });
}

Var abs_(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  return g.make(a.val().cwiseAbs(), needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    Mat s = gr.node(pa).value.array().sign();
    gr.accumulate(pa, up.cwiseProduct(s));
  });
}

Var exp_(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y = a.val().array().exp();
  return g.make(y, needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    gr.accumulate(pa, up.cwiseProduct(Mat(gr.node(pa).value.array().exp())));
  });
}

Var log_(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y = a.val().array().log();
  return g.make(y, needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    gr.accumulate(pa, up.cwiseQuotient(gr.node(pa).value));
  });
}

Var square(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  return g.make(a.val().array().square(), needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    gr.accumulate(pa, 2.0 * up.cwiseProduct(gr.node(pa).value));
  });
}

Var cmin(Var a, Var b) {
  require_same_shape(a, b, "cmin");
  Graph& g = *a.graph();
  bool rg = needs_grad(g, a) || needs_grad(g, b);
  int pa = a.id(), pb = b.id();
  return g.make(a.val().cwiseMin(b.val()), rg, [pa, pb](Graph& gr, const Mat& up) {
    // ties route to a
    Mat take_a = (gr.node(pa).value.array() <= gr.node(pb).value.array()).cast<double>();
    gr.accumulate(pa, up.cwiseProduct(take_a));
    gr.accumulate(pb, up.cwiseProduct(Mat(1.0 - take_a.array())));
  });
}

Var sum(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y(1, 1);
  y(0, 0) = a.val().sum();
  return g.make(std::move(y), needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    const auto& pv = gr.node(pa).value;
    gr.accumulate(pa, Mat::Constant(pv.rows(), pv.cols(), up(0, 0)));
  });
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.val().size())); }

Var sum_cols(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y = a.val().rowwise().sum();
  return g.make(std::move(y), needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    const auto& pv = gr.node(pa).value;
    gr.accumulate(pa, up.col(0).replicate(1, pv.cols()));
  });
}

Var sum_rows(Var a) {
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y = a.val().colwise().sum();
  return g.make(std::move(y), needs_grad(g, a), [pa](Graph& gr, const Mat& up) {
    const auto& pv = gr.node(pa).value;
    gr.accumulate(pa, up.row(0).replicate(pv.rows(), 1));
  });
}

Var hcat(Var a, Var b) {
  require(a.rows() == b.rows(), "hcat: row mismatch");
  Graph& g = *a.graph();
  bool rg = needs_grad(g, a) || needs_grad(g, b);
  int pa = a.id(), pb = b.id();
  Mat y(a.rows(), a.cols() + b.cols());
  y << a.val(), b.val();
  Eigen::Index ca = a.cols();
  return g.make(std::move(y), rg, [pa, pb, ca](Graph& gr, const Mat& up) {
    gr.accumulate(pa, up.leftCols(ca));
    gr.accumulate(pb, up.rightCols(up.cols() - ca));
  });
}

Var block(Var a, Eigen::Index i0, Eigen::Index j0, Eigen::Index r, Eigen::Index c) {
  require(i0 >= 0 && j0 >= 0 && i0 + r <= a.rows() && j0 + c <= a.cols(), "block: out of range");
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y = a.val().block(i0, j0, r, c);
  return g.make(std::move(y), needs_grad(g, a), [pa, i0, j0, r, c](Graph& gr, const Mat& up) {
    const auto& pv = gr.node(pa).value;
    Mat full = Mat::Zero(pv.rows(), pv.cols());
    full.block(i0, j0, r, c) = up;
    gr.accumulate(pa, full);
  });
}

Var rows_strided(Var a, Eigen::Index start, Eigen::Index stride, Eigen::Index count) {
  require(start >= 0 && stride >= 1 && start + stride * (count - 1) < a.rows(),
          "rows_strided: out of range");
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y(count, a.cols());
  for (Eigen::Index k = 0; k < count; ++k) y.row(k) = a.val().row(start + k * stride);
  return g.make(std::move(y), needs_grad(g, a),
                [pa, start, stride, count](Graph& gr, const Mat& up) {
                  const auto& pv = gr.node(pa).value;
                  Mat full = Mat::Zero(pv.rows(), pv.cols());
                  for (Eigen::Index k = 0; k < count; ++k)
                    full.row(start + k * stride) = up.row(k);
                  gr.accumulate(pa, full);
                });
}

Var repeat_rows(Var a, Eigen::Index k) {
  require(k >= 1, "repeat_rows: k must be >= 1");
  Graph& g = *a.graph();
  int pa = a.id();
  Mat y(a.rows() * k, a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < k; ++j) y.row(i * k + j) = a.val().row(i);
  return g.make(std::move(y), needs_grad(g, a), [pa, k](Graph& gr, const Mat& up) {
    const auto& pv = gr.node(pa).value;
    Mat acc = Mat::Zero(pv.rows(), pv.cols());
    for (Eigen::Index i = 0; i < pv.rows(); ++i)
      for (Eigen::Index j = 0; j < k; ++j) acc.row(i) += up.row(i * k + j);
    gr.accumulate(pa, acc);
  });
}

Var detach(Var a) { return a.graph()->constant(a.val()); }

Var masked_log_softmax(Var logits, const Mat& mask) {
  require(mask.rows() == logits.rows() && mask.cols() == logits.cols(),
          "masked_log_softmax: mask shape");
  for (Eigen::Index i = 0; i < mask.rows(); ++i)
    require(mask.row(i).sum() > 0.0, "masked_log_softmax: row with empty mask");
  Graph& g = *logits.graph();
  int pl = logits.id();

  const Mat& x = logits.val();
  Mat logp(x.rows(), x.cols());
  Mat p(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (mask(i, j) != 0.0) mx = std::max(mx, x(i, j));
    double z = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (mask(i, j) != 0.0) z += std::exp(x(i, j) - mx);
    double lz = std::log(z);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      logp(i, j) = x(i, j) - mx - lz;
      p(i, j) = mask(i, j) != 0.0 ? std::exp(logp(i, j)) : 0.0;
    }
  }
  Mat mask_copy = mask;
  return g.make(std::move(logp), needs_grad(g, logits),
                [pl, p, mask_copy](Graph& gr, const Mat& up) {
                  // d logp_a / d x_b = delta_ab - p_b (within the mask)
                  Mat u = up.cwiseProduct(mask_copy);
                  Mat rowsum = u.rowwise().sum();
                  Mat grad = u - (p.array().colwise() * rowsum.col(0).array()).matrix();
                  gr.accumulate(pl, grad);
                });
}

}  // namespace lsfsac::ad
