#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace arct::neural {

using Mat = Eigen::MatrixXd;

// A named parameter tensor with its gradient accumulator.
struct Tensor {
    std::string name;
    Mat value;
    Mat grad;

    Tensor() = default;
    Tensor(std::string n, Mat v) : name(std::move(n)), value(std::move(v)) {
        grad = Mat::Zero(value.rows(), value.cols());
    }
    void zero_grad() { grad.setZero(); }
};

struct Var {
    int id = -1;
};

// Reverse-mode tape over double-precision matrices. Nodes are created in
// topological order, so one reverse sweep propagates gradients; leaves bound
// to a Tensor accumulate into its grad buffer.
class Tape {
public:
    Var leaf(Mat value);
    Var leaf(Tensor& t);
    // Row lookup into an embedding table, returned as a column vector;
    // gradients scatter back into the table row.
    Var embed(Tensor& table, int row);

    const Mat& value(Var v) const { return nodes_[static_cast<size_t>(v.id)].value; }
    Mat& grad(Var v) { return nodes_[static_cast<size_t>(v.id)].grad; }

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var mul(Var a, Var b); // elementwise
    Var tanh_(Var a);
    Var sigmoid_(Var a);
    Var vstack(Var a, Var b);
    Var rows(Var a, int start, int count);
    // Coordinate-wise max over a sequence of equally shaped vectors.
    Var max_pool(const std::vector<Var>& hs);
    Var softmax(Var scores); // column vector -> column vector
    // sum_t weights[t] * hs[t]
    Var attention_pool(const std::vector<Var>& hs, Var weights);
    Var dot(Var a, Var b); // 1x1 result
    // Numerically stable binary cross-entropy on a 1x1 logit.
    Var logistic_loss(Var logit, double target);

    void backward(Var root);

private:
    struct Node {
        Mat value;
        Mat grad;
        std::function<void()> back; // empty for constants
        Tensor* bound = nullptr;
    };

    Var push(Mat value, std::function<void()> back = {});
    std::vector<Node> nodes_;
};

double sigmoid(double x);

} // namespace arct::neural
