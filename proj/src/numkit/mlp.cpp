#include "forl/numkit/mlp.hpp"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace forl::num {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMajor>;
using MapM = Eigen::Map<RowMajor>;

MapC view(const Matrix& m) { return MapC(m.data().data(), m.rows(), m.cols()); }
MapM view(Matrix& m) { return MapM(m.data().data(), m.rows(), m.cols()); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void apply_activation(Activation a, std::span<double> v) {
    if (a == Activation::silu) {
        for (double& x : v) x = x * sigmoid(x);
    }
}

double activation_grad(Activation a, double z) {
    if (a == Activation::silu) {
        const double s = sigmoid(z);
        return s * (1.0 + z * (1.0 - s));
    }
    return 1.0;
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::silu ? "silu" : "identity"; }

Activation activation_from_string(const std::string& s) {
    if (s == "silu") return Activation::silu;
    if (s == "identity") return Activation::identity;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

MlpParams::MlpParams(std::vector<std::size_t> widths, std::vector<Activation> hidden_activations)
    : widths_(std::move(widths)), acts_(std::move(hidden_activations)) {
    if (widths_.size() < 2) throw std::invalid_argument("MlpParams: need at least one layer");
    if (acts_.size() != widths_.size() - 2) {
        throw std::invalid_argument("MlpParams: one activation per hidden layer required");
    }
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        if (widths_[l] == 0 || widths_[l + 1] == 0) throw std::invalid_argument("MlpParams: zero width");
        offsets_.push_back(total);
        total += widths_[l] * widths_[l + 1] + widths_[l + 1];
    }
    flat_.assign(total, 0.0);
}

MlpParams MlpParams::init(std::vector<std::size_t> widths, Activation hidden, Rng& rng) {
    const std::size_t hidden_layers = widths.size() >= 2 ? widths.size() - 2 : 0;
    MlpParams p(std::move(widths), std::vector<Activation>(hidden_layers, hidden));
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(p.widths_[l]));
        for (double& w : p.weights(l)) w = scale * rng.gaussian();
    }
    return p;
}

MlpParams MlpParams::from_layers(const std::vector<std::pair<Matrix, std::vector<double>>>& layers,
                                 std::vector<Activation> hidden_activations) {
    if (layers.empty()) throw std::invalid_argument("MlpParams::from_layers: no layers");
    std::vector<std::size_t> widths{layers.front().first.rows()};
    for (const auto& [w, b] : layers) {
        if (w.rows() != widths.back()) throw std::invalid_argument("MlpParams::from_layers: layer dims do not chain");
        if (b.size() != w.cols()) throw std::invalid_argument("MlpParams::from_layers: bias length mismatch");
        widths.push_back(w.cols());
    }
    MlpParams p(std::move(widths), std::move(hidden_activations));
    for (std::size_t l = 0; l < layers.size(); ++l) {
        std::copy(layers[l].first.data().begin(), layers[l].first.data().end(), p.weights(l).begin());
        std::copy(layers[l].second.begin(), layers[l].second.end(), p.bias(l).begin());
    }
    return p;
}

std::span<double> MlpParams::weights(std::size_t layer) {
    return {flat_.data() + offsets_.at(layer), widths_[layer] * widths_[layer + 1]};
}
std::span<const double> MlpParams::weights(std::size_t layer) const {
    return {flat_.data() + offsets_.at(layer), widths_[layer] * widths_[layer + 1]};
}
std::span<double> MlpParams::bias(std::size_t layer) {
    return {flat_.data() + bias_offset(layer), widths_[layer + 1]};
}
std::span<const double> MlpParams::bias(std::size_t layer) const {
    return {flat_.data() + bias_offset(layer), widths_[layer + 1]};
}

bool MlpParams::all_finite() const {
    for (double x : flat_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Matrix mlp_forward_batch(const MlpParams& params, const Matrix& x, MlpTape* tape) {
    if (params.num_layers() == 0) throw std::invalid_argument("mlp_forward: empty network");
    if (x.cols() != params.in_dim()) {
        throw std::invalid_argument("mlp_forward: input width " + std::to_string(x.cols()) + " != " +
                                    std::to_string(params.in_dim()));
    }
    const auto& widths = params.widths();
    const std::size_t batch = x.rows();
    if (tape) {
        tape->inputs.assign(1, x);
        tape->pre.clear();
    }
    Matrix h = x;
    for (std::size_t l = 0; l < params.num_layers(); ++l) {
        Matrix z(batch, widths[l + 1]);
        MapC w(params.weights(l).data(), widths[l], widths[l + 1]);
        Eigen::Map<const Eigen::RowVectorXd> b(params.bias(l).data(), widths[l + 1]);
        view(z).noalias() = view(h) * w;
        view(z).rowwise() += b;
        const bool hidden = l + 1 < params.num_layers();
        if (hidden) {
            if (tape) tape->pre.push_back(z);
            apply_activation(params.hidden_activations()[l], z.data());
            if (tape) tape->inputs.push_back(z);
        }
        h = std::move(z);
    }
    return h;
}

std::vector<double> mlp_first_layer_partial(const MlpParams& params, std::size_t first_col,
                                            std::span<const double> values) {
    if (params.num_layers() == 0) throw std::invalid_argument("mlp_first_layer_partial: empty network");
    const std::size_t in = params.in_dim();
    const std::size_t out = params.widths()[1];
    if (first_col + values.size() > in) throw std::invalid_argument("mlp_first_layer_partial: columns out of range");
    MapC w(params.weights(0).data() + first_col * out, values.size(), out);
    Eigen::Map<const Eigen::RowVectorXd> v(values.data(), values.size());
    Eigen::Map<const Eigen::RowVectorXd> b(params.bias(0).data(), out);
    std::vector<double> pre(out);
    Eigen::Map<Eigen::RowVectorXd> p(pre.data(), out);
    p.noalias() = v * w;
    p += b;
    return pre;
}

Matrix mlp_forward_batch_shared(const MlpParams& params, const Matrix& head, std::span<const double> shared_pre) {
    if (params.num_layers() == 0) throw std::invalid_argument("mlp_forward: empty network");
    const auto& widths = params.widths();
    if (head.cols() > params.in_dim() || shared_pre.size() != widths[1]) {
        throw std::invalid_argument("mlp_forward_batch_shared: shape mismatch");
    }
    const std::size_t batch = head.rows();
    Matrix h(batch, widths[1]);
    MapC w0(params.weights(0).data(), head.cols(), widths[1]);
    Eigen::Map<const Eigen::RowVectorXd> c(shared_pre.data(), widths[1]);
    view(h).noalias() = view(head) * w0;
    view(h).rowwise() += c;
    for (std::size_t l = 1; l <= params.num_layers(); ++l) {
        if (l - 1 < params.hidden_activations().size()) apply_activation(params.hidden_activations()[l - 1], h.data());
        if (l == params.num_layers()) break;
        Matrix z(batch, widths[l + 1]);
        MapC w(params.weights(l).data(), widths[l], widths[l + 1]);
        Eigen::Map<const Eigen::RowVectorXd> b(params.bias(l).data(), widths[l + 1]);
        view(z).noalias() = view(h) * w;
        view(z).rowwise() += b;
        h = std::move(z);
    }
    return h;
}

Matrix mlp_backward_batch(const MlpParams& params, const MlpTape& tape, const Matrix& upstream,
                          std::span<double> grad_accum) {
    const auto& widths = params.widths();
    const std::size_t layers = params.num_layers();
    if (tape.inputs.size() != layers || tape.pre.size() + 1 != layers) {
        throw std::invalid_argument("mlp_backward: tape does not match network");
    }
    if (upstream.cols() != params.out_dim() || upstream.rows() != tape.inputs[0].rows()) {
        throw std::invalid_argument("mlp_backward: upstream gradient shape mismatch");
    }
    if (grad_accum.size() != params.num_params()) {
        throw std::invalid_argument("mlp_backward: gradient buffer has wrong length");
    }
    Matrix g = upstream;
    for (std::size_t li = layers; li-- > 0;) {
        const Matrix& in = tape.inputs[li];
        MapM dw(grad_accum.data() + params.weight_offset(li), widths[li], widths[li + 1]);
        Eigen::Map<Eigen::RowVectorXd> db(grad_accum.data() + params.bias_offset(li), widths[li + 1]);
        dw.noalias() += view(in).transpose() * view(g);
        db += view(g).colwise().sum();
        MapC w(params.weights(li).data(), widths[li], widths[li + 1]);
        Matrix dh(in.rows(), widths[li]);
        view(dh).noalias() = view(g) * w.transpose();
        if (li > 0) {
            const Matrix& z = tape.pre[li - 1];
            const Activation act = params.hidden_activations()[li - 1];
            auto dd = dh.data();
            auto zd = z.data();
            for (std::size_t i = 0; i < dd.size(); ++i) dd[i] *= activation_grad(act, zd[i]);
        }
        g = std::move(dh);
    }
    return g;
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input) {
    Matrix x(1, input.size(), std::vector<double>(input.begin(), input.end()));
    Matrix y = mlp_forward_batch(params, x);
    return y.values();
}

MlpGradients mlp_backward(const MlpParams& params, std::span<const double> input,
                          std::span<const double> upstream) {
    if (upstream.size() != params.out_dim()) {
        throw std::invalid_argument("mlp_backward: upstream length mismatch");
    }
    Matrix x(1, input.size(), std::vector<double>(input.begin(), input.end()));
    MlpTape tape;
    mlp_forward_batch(params, x, &tape);
    MlpGradients out;
    out.params.assign(params.num_params(), 0.0);
    Matrix up(1, upstream.size(), std::vector<double>(upstream.begin(), upstream.end()));
    out.input = mlp_backward_batch(params, tape, up, out.params).values();
    return out;
}

}  // namespace forl::num
