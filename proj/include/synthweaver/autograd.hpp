//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

namespace synthweaver::autograd {

using Mat = Eigen::MatrixXd;

struct Node {
  Mat value;
  Mat grad;
  bool requires_grad = false;
  std::function<void(Node&)> backward;  // pushes this->grad into the inputs

  void ensure_grad() {
    if (grad.size() == 0) grad = Mat::Zero(value.rows(), value.cols());
  }
};

using Ptr = std::shared_ptr<Node>;

// Records ops in creation order; backward() walks them in reverse. Small and
// single-use: build one tape per loss evaluation.
class Tape {
 public:
  Ptr leaf(Mat value, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    nodes_.push_back(n);
    return n;
  }

  Ptr matmul(const Ptr& a, const Ptr& b) {
    return record(a->value * b->value, {a, b}, [a, b](Node& out) {
      if (a->requires_grad) {
        a->ensure_grad();
        a->grad.noalias() += out.grad * b->value.transpose();
      }
      if (b->requires_grad) {
        b->ensure_grad();
        b->grad.noalias() += a->value.transpose() * out.grad;
      }
    });
  }

  Ptr add(const Ptr& a, const Ptr& b) {
    return record(a->value + b->value, {a, b}, [a, b](Node& out) {
      if (a->requires_grad) {
        a->ensure_grad();
        a->grad += out.grad;
      }
      if (b->requires_grad) {
        b->ensure_grad();
        b->grad += out.grad;
      }
    });
  }

  // adds a 1 x C bias row to every row of a
  Ptr add_row(const Ptr& a, const Ptr& bias) {
    Mat v = a->value;
    v.rowwise() += bias->value.row(0);
    return record(std::move(v), {a, bias}, [a, bias](Node& out) {
      if (a->requires_grad) {
        a->ensure_grad();
        a->grad += out.grad;
      }
      if (bias->requires_grad) {
        bias->ensure_grad();
        bias->grad.row(0) += out.grad.colwise().sum();
      }
    });
  }

  Ptr relu(const Ptr& a) {
    return record(a->value.cwiseMax(0.0), {a}, [a](Node& out) {
      if (!a->requires_grad) return;
      a->ensure_grad();
      a->grad.array() += out.grad.array() * (a->value.array() > 0.0).cast<double>();
    });
  }

  Ptr sigmoid(const Ptr& a) {
    Mat s = (1.0 / (1.0 + (-a->value.array()).exp())).matrix();
    auto sval = std::make_shared<Mat>(s);
    return record(std::move(s), {a}, [a, sval](Node& out) {
      if (!a->requires_grad) return;
      a->ensure_grad();
      a->grad.array() += out.grad.array() * sval->array() * (1.0 - sval->array());
    });
  }

  // elementwise product with a constant mask (dropout)
  Ptr mask(const Ptr& a, Mat m) {
    Mat v = a->value.cwiseProduct(m);
    auto mask_mat = std::make_shared<Mat>(std::move(m));
    return record(std::move(v), {a}, [a, mask_mat](Node& out) {
      if (!a->requires_grad) return;
      a->ensure_grad();
      a->grad += out.grad.cwiseProduct(*mask_mat);
    });
  }

  Ptr concat_cols(const Ptr& a, const Ptr& b) {
    Mat v(a->value.rows(), a->value.cols() + b->value.cols());
    v << a->value, b->value;
    return record(std::move(v), {a, b}, [a, b](Node& out) {
      if (a->requires_grad) {
        a->ensure_grad();
        a->grad += out.grad.leftCols(a->value.cols());
      }
      if (b->requires_grad) {
        b->ensure_grad();
        b->grad += out.grad.rightCols(b->value.cols());
      }
    });
  }

  Ptr gather_rows(const Ptr& a, std::vector<int> idx) {
    Mat v(static_cast<Eigen::Index>(idx.size()), a->value.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = a->value.row(idx[i]);
    auto id = std::make_shared<std::vector<int>>(std::move(idx));
    return record(std::move(v), {a}, [a, id](Node& out) {
      if (!a->requires_grad) return;
      a->ensure_grad();
      for (std::size_t i = 0; i < id->size(); ++i)
        a->grad.row((*id)[i]) += out.grad.row(static_cast<Eigen::Index>(i));
    });
  }

  // sums rows of a into nseg buckets
  Ptr segment_sum(const Ptr& a, std::vector<int> seg, int nseg) {
    Mat v = Mat::Zero(nseg, a->value.cols());
    for (std::size_t i = 0; i < seg.size(); ++i) v.row(seg[i]) += a->value.row(static_cast<Eigen::Index>(i));
    auto id = std::make_shared<std::vector<int>>(std::move(seg));
    return record(std::move(v), {a}, [a, id](Node& out) {
      if (!a->requires_grad) return;
      a->ensure_grad();
      for (std::size_t i = 0; i < id->size(); ++i)
        a->grad.row(static_cast<Eigen::Index>(i)) += out.grad.row((*id)[i]);
    });
  }

  Ptr sub(const Ptr& a, const Ptr& b) {
    return record(a->value - b->value, {a, b}, [a, b](Node& out) {
      if (a->requires_grad) {
        a->ensure_grad();
        a->grad += out.grad;
      }
      if (b->requires_grad) {
        b->ensure_grad();
        b->grad -= out.grad;
      }
    });
  }

  // mean of squared entries -> 1x1
  Ptr mean_square(const Ptr& a) {
    double n = static_cast<double>(a->value.size());
    Mat v(1, 1);
    v(0, 0) = a->value.array().square().sum() / n;
    return record(std::move(v), {a}, [a, n](Node& out) {
      if (!a->requires_grad) return;
      a->ensure_grad();
      a->grad += (2.0 / n) * out.grad(0, 0) * a->value;
    });
  }

  // numerically stable mean binary cross-entropy against {0,1} targets,
  // taking logits: mean(max(z,0) - z*y + log(1+exp(-|z|)))
  Ptr bce_with_logits(const Ptr& z, Mat y) {
    double n = static_cast<double>(z->value.size());
    auto targets = std::make_shared<Mat>(std::move(y));
    Eigen::ArrayXXd za = z->value.array();
    Eigen::ArrayXXd ya = (*targets).array();
    double loss = (za.max(0.0) - za * ya + (1.0 + (-za.abs()).exp()).log()).sum() / n;
    Mat v(1, 1);
    v(0, 0) = loss;
    return record(std::move(v), {z}, [z, targets, n](Node& out) {
      if (!z->requires_grad) return;
      z->ensure_grad();
      Eigen::ArrayXXd sig = 1.0 / (1.0 + (-z->value.array()).exp());
      z->grad.array() += (out.grad(0, 0) / n) * (sig - (*targets).array());
    });
  }

  void backward(const Ptr& root) {
    root->ensure_grad();
    root->grad.setConstant(1.0);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      Node& n = **it;
      if (n.backward && n.grad.size() != 0) n.backward(n);
    }
  }

 private:
  Ptr record(Mat value, std::initializer_list<Ptr> inputs,
             std::function<void(Node&)> back) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    for (const Ptr& p : inputs) n->requires_grad |= p->requires_grad;
    if (n->requires_grad) n->backward = std::move(back);
    nodes_.push_back(n);
    return n;
  }

  std::vector<Ptr> nodes_;
};

}  // namespace synthweaver::autograd
