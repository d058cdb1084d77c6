#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/matrix.hpp"

namespace fairhsic::diff {

enum class Op {
    input,
    parameter,
    constant,
    matmul,
    transpose,
    add,
    sub,
    scale,
    tanh,
    cos,
    exp,
    square,
    row_sum,
    total_sum,
    softmax_cross_entropy,
    row_gather,
    frobenius_sq,
    trace_product,
    scale_gradient,
};

inline const char* op_name(Op op) noexcept {
    switch (op) {
    case Op::input: return "input";
    case Op::parameter: return "parameter";
    case Op::constant: return "constant";
    case Op::matmul: return "matmul";
    case Op::transpose: return "transpose";
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::scale: return "scale";
    case Op::tanh: return "tanh";
    case Op::cos: return "cos";
    case Op::exp: return "exp";
    case Op::square: return "square";
    case Op::row_sum: return "row_sum";
    case Op::total_sum: return "total_sum";
    case Op::softmax_cross_entropy: return "softmax_cross_entropy";
    case Op::row_gather: return "row_gather";
    case Op::frobenius_sq: return "frobenius_sq";
    case Op::trace_product: return "trace_product";
    case Op::scale_gradient: return "scale_gradient";
    }
    return "unknown";
}

using Bindings = std::map<std::string, Matrix>;

// Handle to a node of a Graph. Only meaningful for the graph that created it.
struct Var {
    std::size_t id = 0;
};

// A static computation graph over dense matrices. Nodes are appended in
// topological order by construction, so evaluation is a single forward sweep
// and differentiation a single reverse sweep.
//
// `scale_gradient` is the identity on the forward pass and multiplies the
// incoming adjoint by a constant on the way back (gradient reversal for a
// negative factor). It is the only op whose adjoint is not the derivative.
class Graph {
public:
    Var input(std::string name) { return push(make_node(Op::input, std::move(name))); }
    Var parameter(std::string name) { return push(make_node(Op::parameter, std::move(name))); }
    Var constant(Matrix value, std::string name = {}) {
        Node n = make_node(Op::constant, std::move(name));
        n.value = std::move(value);
        return push(std::move(n));
    }

    Var matmul(Var a, Var b) { return binary(Op::matmul, a, b); }
    Var transpose(Var a) { return unary(Op::transpose, a); }
    // `b` may have the same shape as `a` or be a 1 x cols row broadcast over rows.
    Var add(Var a, Var b) { return binary(Op::add, a, b); }
    Var sub(Var a, Var b) { return binary(Op::sub, a, b); }
    Var scale(Var a, double c) {
        Var v = unary(Op::scale, a);
        nodes_[v.id].scalar = c;
        return v;
    }
    Var tanh(Var a) { return unary(Op::tanh, a); }
    Var cos(Var a) { return unary(Op::cos, a); }
    Var exp(Var a) { return unary(Op::exp, a); }
    Var square(Var a) { return unary(Op::square, a); }
    Var row_sum(Var a) { return unary(Op::row_sum, a); }
    Var total_sum(Var a) { return unary(Op::total_sum, a); }
    // Mean over rows of -log softmax(logits)[label].
    Var softmax_cross_entropy(Var logits, std::vector<std::size_t> labels) {
        Var v = unary(Op::softmax_cross_entropy, logits);
        nodes_[v.id].indices = std::move(labels);
        return v;
    }
    Var row_gather(Var a, std::vector<std::size_t> rows) {
        Var v = unary(Op::row_gather, a);
        nodes_[v.id].indices = std::move(rows);
        return v;
    }
    Var frobenius_sq(Var a) { return unary(Op::frobenius_sq, a); }
    // tr(A B)
    Var trace_product(Var a, Var b) { return binary(Op::trace_product, a, b); }
    Var scale_gradient(Var a, double factor) {
        Var v = unary(Op::scale_gradient, a);
        nodes_[v.id].scalar = factor;
        return v;
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    Op op(Var v) const { return node(v).op; }
    const std::string& name(Var v) const { return node(v).name; }
    bool evaluated() const noexcept { return evaluated_; }

    const Matrix& value(Var v) const {
        if (!evaluated_) throw StateError("graph value requested before forward");
        return node(v).value;
    }
    const Matrix& adjoint(Var v) const {
        if (!differentiated_) throw StateError("graph adjoint requested before backward");
        return node(v).adjoint;
    }

    // Evaluates every node once. Returns the value of `output`.
    const Matrix& forward(const Bindings& bindings, Var output) {
        if (output.id >= nodes_.size()) throw InvalidArgument("output node does not belong to graph");
        evaluated_ = false;
        differentiated_ = false;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            Node& n = nodes_[i];
            if (n.op == Op::input || n.op == Op::parameter) {
                auto it = bindings.find(n.name);
                if (it == bindings.end()) {
                    throw InvalidArgument("node " + std::to_string(i) + " (" + op_name(n.op) + " '" + n.name +
                                          "') is unbound");
                }
                n.value = it->second;
            } else if (n.op != Op::constant) {
                n.value = evaluate(i);
            }
            if (!n.value.all_finite()) {
                throw NonFiniteError("node " + std::to_string(i) + " (" + op_name(n.op) +
                                     (n.name.empty() ? "" : " '" + n.name + "'") + ") produced a non-finite value");
            }
        }
        output_ = output;
        evaluated_ = true;
        return nodes_[output.id].value;
    }

    // Reverse sweep from the output of the last forward call. Returns the
    // gradient of every parameter node, keyed by name; parameters with no path
    // to the output get an exact zero matrix.
    Bindings backward() {
        if (!evaluated_) throw StateError("backward called before forward");
        const Matrix& out = nodes_[output_.id].value;
        if (out.rows() != 1 || out.cols() != 1) {
            throw ShapeError("backward requires a scalar output, node " + std::to_string(output_.id) + " is " +
                             out.shape_string());
        }
        for (Node& n : nodes_) n.adjoint = Matrix(n.value.rows(), n.value.cols());
        nodes_[output_.id].adjoint(0, 0) = 1.0;
        for (std::size_t i = output_.id + 1; i-- > 0;) propagate(i);
        differentiated_ = true;

        Bindings grads;
        for (const Node& n : nodes_) {
            if (n.op != Op::parameter) continue;
            auto [it, inserted] = grads.emplace(n.name, n.adjoint);
            if (!inserted) it->second.eigen() += n.adjoint.eigen();
        }
        return grads;
    }

    std::vector<std::string> parameter_names() const {
        std::vector<std::string> names;
        for (const Node& n : nodes_) {
            if (n.op == Op::parameter) names.push_back(n.name);
        }
        return names;
    }

private:
    struct Node {
        Op op;
        std::string name;
        std::size_t parents[2] = {0, 0};
        std::size_t arity = 0;
        double scalar = 0.0;
        std::vector<std::size_t> indices;
        Matrix value;
        Matrix adjoint;
    };

    static Node make_node(Op op, std::string name) {
        Node n{};
        n.op = op;
        n.name = std::move(name);
        return n;
    }

    const Node& node(Var v) const {
        if (v.id >= nodes_.size()) throw InvalidArgument("node does not belong to graph");
        return nodes_[v.id];
    }

    Var push(Node n) {
        nodes_.push_back(std::move(n));
        evaluated_ = false;
        return Var{nodes_.size() - 1};
    }

    Var unary(Op op, Var a) {
        node(a);
        Node n = make_node(op, {});
        n.parents[0] = a.id;
        n.arity = 1;
        return push(std::move(n));
    }

    Var binary(Op op, Var a, Var b) {
        node(a);
        node(b);
        Node n = make_node(op, {});
        n.parents[0] = a.id;
        n.parents[1] = b.id;
        n.arity = 2;
        return push(std::move(n));
    }

    [[noreturn]] void shape_fail(std::size_t i, const std::string& detail) const {
        throw ShapeError("node " + std::to_string(i) + " (" + op_name(nodes_[i].op) + "): " + detail);
    }

    static bool is_row_broadcast(const Matrix& a, const Matrix& b) {
        return b.rows() == 1 && b.cols() == a.cols() && a.rows() != 1;
    }

    Matrix evaluate(std::size_t i) const {
        const Node& n = nodes_[i];
        const Matrix& a = nodes_[n.parents[0]].value;
        const Matrix* bp = n.arity == 2 ? &nodes_[n.parents[1]].value : nullptr;
        switch (n.op) {
        case Op::matmul: {
            const Matrix& b = *bp;
            if (a.cols() != b.rows()) shape_fail(i, a.shape_string() + " times " + b.shape_string());
            return diff::matmul(a, b);
        }
        case Op::transpose: return diff::transpose(a);
        case Op::add:
        case Op::sub: {
            const Matrix& b = *bp;
            const double sign = n.op == Op::add ? 1.0 : -1.0;
            Matrix out = a;
            if (a.same_shape(b)) {
                out.eigen() += sign * b.eigen();
            } else if (is_row_broadcast(a, b)) {
                out.eigen().rowwise() += sign * b.eigen().row(0);
            } else {
                shape_fail(i, a.shape_string() + " with " + b.shape_string());
            }
            return out;
        }
        case Op::scale: {
            Matrix out = a;
            out.eigen() *= n.scalar;
            return out;
        }
        case Op::tanh: return map(a, [](double x) { return std::tanh(x); });
        case Op::cos: return map(a, [](double x) { return std::cos(x); });
        case Op::exp: return map(a, [](double x) { return std::exp(x); });
        case Op::square: return map(a, [](double x) { return x * x; });
        case Op::row_sum: {
            Matrix out(a.rows(), 1);
            out.eigen() = a.eigen().rowwise().sum();
            return out;
        }
        case Op::total_sum: return Matrix::scalar(a.eigen().sum());
        case Op::softmax_cross_entropy: {
            if (n.indices.size() != a.rows() || a.rows() == 0) {
                shape_fail(i, std::to_string(n.indices.size()) + " labels for logits " + a.shape_string());
            }
            double total = 0.0;
            for (std::size_t r = 0; r < a.rows(); ++r) {
                if (n.indices[r] >= a.cols()) shape_fail(i, "label out of range");
                auto row = a.row_span(r);
                const double mx = *std::max_element(row.begin(), row.end());
                double z = 0.0;
                for (double v : row) z += std::exp(v - mx);
                total += mx + std::log(z) - row[n.indices[r]];
            }
            return Matrix::scalar(total / static_cast<double>(a.rows()));
        }
        case Op::row_gather: {
            for (std::size_t r : n.indices) {
                if (r >= a.rows()) shape_fail(i, "gather row " + std::to_string(r) + " of " + a.shape_string());
            }
            return select_rows(a, n.indices);
        }
        case Op::frobenius_sq: return Matrix::scalar(a.eigen().squaredNorm());
        case Op::trace_product: {
            const Matrix& b = *bp;
            if (a.rows() != b.cols() || a.cols() != b.rows()) {
                shape_fail(i, "tr(" + a.shape_string() + " * " + b.shape_string() + ")");
            }
            // tr(AB) = sum_ij A_ij B_ji
            return Matrix::scalar(a.eigen().cwiseProduct(b.eigen().transpose()).sum());
        }
        case Op::scale_gradient: return a;
        case Op::input:
        case Op::parameter:
        case Op::constant: break;
        }
        shape_fail(i, "not evaluable");
    }

    template <class F>
    static Matrix map(const Matrix& a, F f) {
        Matrix out(a.rows(), a.cols());
        for (std::size_t k = 0; k < a.size(); ++k) out.data()[k] = f(a.data()[k]);
        return out;
    }

    void propagate(std::size_t i) {
        Node& n = nodes_[i];
        if (n.arity == 0) return;
        const Matrix& g = n.adjoint;
        Node& pa = nodes_[n.parents[0]];
        const Matrix& a = pa.value;
        auto ga = pa.adjoint.eigen();
        switch (n.op) {
        case Op::matmul: {
            Node& pb = nodes_[n.parents[1]];
            ga.noalias() += g.eigen() * pb.value.eigen().transpose();
            pb.adjoint.eigen().noalias() += a.eigen().transpose() * g.eigen();
            break;
        }
        case Op::transpose: ga += g.eigen().transpose(); break;
        case Op::add:
        case Op::sub: {
            Node& pb = nodes_[n.parents[1]];
            const double sign = n.op == Op::add ? 1.0 : -1.0;
            ga += g.eigen();
            if (pb.value.same_shape(a)) {
                pb.adjoint.eigen() += sign * g.eigen();
            } else {
                pb.adjoint.eigen() += sign * g.eigen().colwise().sum();
            }
            break;
        }
        case Op::scale: ga += n.scalar * g.eigen(); break;
        case Op::tanh: ga += g.eigen().cwiseProduct((1.0 - n.value.eigen().array().square()).matrix()); break;
        case Op::cos: ga -= g.eigen().cwiseProduct(a.eigen().array().sin().matrix()); break;
        case Op::exp: ga += g.eigen().cwiseProduct(n.value.eigen()); break;
        case Op::square: ga += 2.0 * g.eigen().cwiseProduct(a.eigen()); break;
        case Op::row_sum: ga += g.eigen() * RowMajor::Ones(1, a.eigen().cols()); break;
        case Op::total_sum: ga.array() += g(0, 0); break;
        case Op::softmax_cross_entropy: {
            const double scale = g(0, 0) / static_cast<double>(a.rows());
            for (std::size_t r = 0; r < a.rows(); ++r) {
                auto row = a.row_span(r);
                const double mx = *std::max_element(row.begin(), row.end());
                double z = 0.0;
                for (double v : row) z += std::exp(v - mx);
                for (std::size_t c = 0; c < a.cols(); ++c) {
                    const double p = std::exp(row[c] - mx) / z;
                    pa.adjoint(r, c) += scale * (p - (c == n.indices[r] ? 1.0 : 0.0));
                }
            }
            break;
        }
        case Op::row_gather:
            for (std::size_t k = 0; k < n.indices.size(); ++k) {
                ga.row(static_cast<Eigen::Index>(n.indices[k])) += g.eigen().row(static_cast<Eigen::Index>(k));
            }
            break;
        case Op::frobenius_sq: ga += 2.0 * g(0, 0) * a.eigen(); break;
        case Op::trace_product: {
            Node& pb = nodes_[n.parents[1]];
            ga += g(0, 0) * pb.value.eigen().transpose();
            pb.adjoint.eigen() += g(0, 0) * a.eigen().transpose();
            break;
        }
        case Op::scale_gradient: ga += n.scalar * g.eigen(); break;
        case Op::input:
        case Op::parameter:
        case Op::constant: break;
        }
    }

    std::vector<Node> nodes_;
    Var output_{};
    bool evaluated_ = false;
    bool differentiated_ = false;
};

} // namespace fairhsic::diff
