#include "arct/neural/autodiff.hpp"

#include <cmath>

#include "arct/error.hpp"

namespace arct::neural {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Var Tape::push(Mat value, std::function<void()> back) {
    Node node;
    node.value = std::move(value);
    node.grad = Mat::Zero(node.value.rows(), node.value.cols());
    node.back = std::move(back);
    nodes_.push_back(std::move(node));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Mat value) { return push(std::move(value)); }

Var Tape::leaf(Tensor& t) {
    const Var v = push(t.value);
    nodes_.back().bound = &t;
    Tape* tp = this;
    nodes_.back().back = [tp, v]() {
        Node& n = tp->nodes_[static_cast<size_t>(v.id)];
        n.bound->grad += n.grad;
    };
    return v;
}

Var Tape::embed(Tensor& table, int row) {
    const Var v = push(table.value.row(row).transpose());
    nodes_.back().bound = &table;
    Tape* tp = this;
    nodes_.back().back = [tp, v, row]() {
        Node& n = tp->nodes_[static_cast<size_t>(v.id)];
        n.bound->grad.row(row) += n.grad.transpose();
    };
    return v;
}

Var Tape::matmul(Var a, Var b) {
    Var out = push(value(a) * value(b));
    Tape* t = this;
    nodes_.back().back = [t, out, a, b]() {
        t->grad(a) += t->grad(out) * t->value(b).transpose();
        t->grad(b) += t->value(a).transpose() * t->grad(out);
    };
    return out;
}

Var Tape::add(Var a, Var b) {
    Var out = push(value(a) + value(b));
    Tape* t = this;
    nodes_.back().back = [t, out, a, b]() {
        t->grad(a) += t->grad(out);
        t->grad(b) += t->grad(out);
    };
    return out;
}

Var Tape::mul(Var a, Var b) {
    Var out = push(value(a).cwiseProduct(value(b)));
    Tape* t = this;
    nodes_.back().back = [t, out, a, b]() {
        t->grad(a) += t->grad(out).cwiseProduct(t->value(b));
        t->grad(b) += t->grad(out).cwiseProduct(t->value(a));
    };
    return out;
}

Var Tape::tanh_(Var a) {
    Var out = push(value(a).array().tanh().matrix());
    Tape* t = this;
    nodes_.back().back = [t, out, a]() {
        t->grad(a) += t->grad(out).cwiseProduct(
            (1.0 - t->value(out).array().square()).matrix());
    };
    return out;
}

Var Tape::sigmoid_(Var a) {
    Mat s = value(a);
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = sigmoid(s(i));
    Var out = push(std::move(s));
    Tape* t = this;
    nodes_.back().back = [t, out, a]() {
        const Mat& s = t->value(out);
        t->grad(a) += t->grad(out).cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
    };
    return out;
}

Var Tape::vstack(Var a, Var b) {
    const Mat& va = value(a);
    const Mat& vb = value(b);
    Mat stacked(va.rows() + vb.rows(), va.cols());
    stacked << va, vb;
    Var out = push(std::move(stacked));
    Tape* t = this;
    const Eigen::Index na = va.rows();
    nodes_.back().back = [t, out, a, b, na]() {
        const Mat& g = t->grad(out);
        t->grad(a) += g.topRows(na);
        t->grad(b) += g.bottomRows(g.rows() - na);
    };
    return out;
}

Var Tape::rows(Var a, int start, int count) {
    Var out = push(value(a).middleRows(start, count));
    Tape* t = this;
    nodes_.back().back = [t, out, a, start, count]() {
        t->grad(a).middleRows(start, count) += t->grad(out);
    };
    return out;
}

Var Tape::max_pool(const std::vector<Var>& hs) {
    if (hs.empty()) throw Error("max_pool: empty sequence");
    Mat pooled = value(hs[0]);
    std::vector<int> argmax(static_cast<size_t>(pooled.size()), 0);
    for (size_t tstep = 1; tstep < hs.size(); ++tstep) {
        const Mat& v = value(hs[tstep]);
        for (Eigen::Index i = 0; i < pooled.size(); ++i) {
            if (v(i) > pooled(i)) {
                pooled(i) = v(i);
                argmax[static_cast<size_t>(i)] = static_cast<int>(tstep);
            }
        }
    }
    Var out = push(std::move(pooled));
    Tape* t = this;
    std::vector<Var> seq = hs;
    nodes_.back().back = [t, out, seq, argmax]() {
        const Mat& g = t->grad(out);
        for (Eigen::Index i = 0; i < g.size(); ++i)
            t->grad(seq[static_cast<size_t>(argmax[static_cast<size_t>(i)])])(i) += g(i);
    };
    return out;
}

Var Tape::softmax(Var scores) {
    const Mat& z = value(scores);
    Mat s = z;
    const double zmax = z.maxCoeff();
    double total = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        s(i) = std::exp(z(i) - zmax);
        total += s(i);
    }
    s /= total;
    Var out = push(std::move(s));
    Tape* t = this;
    nodes_.back().back = [t, out, scores]() {
        const Mat& s = t->value(out);
        const Mat& g = t->grad(out);
        const double inner = (s.array() * g.array()).sum();
        t->grad(scores) += (s.array() * (g.array() - inner)).matrix();
    };
    return out;
}

Var Tape::attention_pool(const std::vector<Var>& hs, Var weights) {
    if (hs.empty()) throw Error("attention_pool: empty sequence");
    const Mat& w = value(weights);
    if (w.rows() != static_cast<Eigen::Index>(hs.size()) || w.cols() != 1)
        throw Error("attention_pool: weight shape mismatch");
    Mat pooled = Mat::Zero(value(hs[0]).rows(), 1);
    for (size_t i = 0; i < hs.size(); ++i) pooled += w(static_cast<Eigen::Index>(i)) * value(hs[i]);
    Var out = push(std::move(pooled));
    Tape* t = this;
    std::vector<Var> seq = hs;
    nodes_.back().back = [t, out, seq, weights]() {
        const Mat& g = t->grad(out);
        const Mat& w = t->value(weights);
        for (size_t i = 0; i < seq.size(); ++i) {
            t->grad(seq[i]) += w(static_cast<Eigen::Index>(i)) * g;
            t->grad(weights)(static_cast<Eigen::Index>(i)) += t->value(seq[i]).col(0).dot(g.col(0));
        }
    };
    return out;
}

Var Tape::dot(Var a, Var b) {
    Mat out(1, 1);
    out(0, 0) = value(a).col(0).dot(value(b).col(0));
    Var v = push(std::move(out));
    Tape* t = this;
    nodes_.back().back = [t, v, a, b]() {
        const double g = t->grad(v)(0, 0);
        t->grad(a) += g * t->value(b);
        t->grad(b) += g * t->value(a);
    };
    return v;
}

Var Tape::logistic_loss(Var logit, double target) {
    const double z = value(logit)(0, 0);
    Mat out(1, 1);
    out(0, 0) = std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
    Var v = push(std::move(out));
    Tape* t = this;
    nodes_.back().back = [t, v, logit, z, target]() {
        t->grad(logit)(0, 0) += t->grad(v)(0, 0) * (sigmoid(z) - target);
    };
    return v;
}

void Tape::backward(Var root) {
    Node& r = nodes_[static_cast<size_t>(root.id)];
    if (r.value.size() != 1) throw Error("backward: root must be scalar");
    r.grad(0, 0) = 1.0;
    for (int id = root.id; id >= 0; --id) {
        Node& node = nodes_[static_cast<size_t>(id)];
        if (node.back) node.back();
    }
}

} // namespace arct::neural
