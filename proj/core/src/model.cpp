#include "uef/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uef {
namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) {
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

std::vector<std::size_t> layer_widths(std::size_t d, ModelKind kind) {
    if (kind == ModelKind::logistic) return {d, 1};
    return {d, kMlpHiddenWidths[0], kMlpHiddenWidths[1], 1};
}

// z = a * W + b
Matrix affine(const Matrix& a, const Layer& layer) {
    const std::size_t n = a.rows();
    const std::size_t in = layer.weights.rows();
    const std::size_t out = layer.weights.cols();
    Matrix z(n, out);
    for (std::size_t i = 0; i < n; ++i) {
        auto ai = a.row(i);
        for (std::size_t o = 0; o < out; ++o) {
            double acc = layer.bias[o];
            for (std::size_t j = 0; j < in; ++j) acc += ai[j] * layer.weights(j, o);
            z(i, o) = acc;
        }
    }
    return z;
}

struct ForwardState {
    std::vector<Matrix> activations;  // a_0 = input, per layer post-activation
    std::vector<Matrix> pre;          // z per layer
};

// Hidden layers: ReLU then optional dropout mask; output layer: identity (the
// loss works on the logit directly).
ForwardState forward(const Classifier& c, const Matrix& X,
                     const model_detail::DropoutMasks* masks) {
    if (X.cols() != c.feature_count())
        throw Error(ErrorKind::shape, "input has " + std::to_string(X.cols()) +
                                          " features, model expects " +
                                          std::to_string(c.feature_count()));
    ForwardState st;
    st.activations.push_back(X);
    for (std::size_t l = 0; l < c.layers.size(); ++l) {
        Matrix z = affine(st.activations.back(), c.layers[l]);
        st.pre.push_back(z);
        if (l + 1 < c.layers.size()) {
            Matrix h = z;
            for (double& v : h.data()) v = v > 0.0 ? v : 0.0;
            if (masks != nullptr) {
                const Matrix& m = (*masks)[l];
                for (std::size_t i = 0; i < h.data().size(); ++i) h.data()[i] *= m.data()[i];
            }
            st.activations.push_back(std::move(h));
        } else {
            st.activations.push_back(std::move(z));
        }
    }
    return st;
}

std::size_t param_count(const Classifier& c) {
    std::size_t n = 0;
    for (const auto& l : c.layers) n += l.weights.data().size() + l.bias.size();
    return n;
}

}  // namespace

void HyperParams::validate() const {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw Error(ErrorKind::config, "threshold must lie in (0,1)");
    if (!(l2 >= 0.0) || !std::isfinite(l2))
        throw Error(ErrorKind::config, "l2 must be finite and >= 0");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw Error(ErrorKind::config, "learning_rate must be finite and > 0");
    if (epochs < 1) throw Error(ErrorKind::config, "epochs must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0))
        throw Error(ErrorKind::config, "dropout must lie in [0,1)");
}

const char* model_kind_name(ModelKind kind) {
    return kind == ModelKind::logistic ? "logistic" : "mlp2";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "logistic") return ModelKind::logistic;
    if (name == "mlp2") return ModelKind::mlp2;
    throw Error(ErrorKind::config, "unknown model kind: " + name);
}

std::vector<double> Classifier::predict_proba(const Matrix& X) const {
    ForwardState st = forward(*this, X, nullptr);
    const Matrix& z = st.activations.back();
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = sigmoid(z(i, 0));
    return out;
}

std::vector<int> Classifier::predict_label(const Matrix& X) const {
    std::vector<double> p = predict_proba(X);
    std::vector<int> lab(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) lab[i] = p[i] >= hp.threshold ? 1 : 0;
    return lab;
}

Classifier init_classifier(std::size_t d, ModelKind kind, const HyperParams& hp,
                           rng::Seed seed) {
    hp.validate();
    if (d == 0) throw Error(ErrorKind::shape, "model needs at least one feature");
    Classifier c;
    c.kind = kind;
    c.hp = hp;
    c.train_seed = seed;
    const auto widths = layer_widths(d, kind);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const std::size_t fan_in = widths[l];
        const std::size_t fan_out = widths[l + 1];
        rng::Engine eng(rng::derive(seed, {rng::hash_str("init"), l}));
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Layer layer;
        layer.weights = Matrix(fan_in, fan_out);
        for (double& w : layer.weights.data()) w = eng.uniform(-bound, bound);
        layer.bias.assign(fan_out, 0.0);
        c.layers.push_back(std::move(layer));
    }
    return c;
}

namespace model_detail {

std::vector<double> flatten_params(const Classifier& c) {
    std::vector<double> out;
    out.reserve(param_count(c));
    for (const auto& l : c.layers) {
        out.insert(out.end(), l.weights.data().begin(), l.weights.data().end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

void unflatten_params(Classifier& c, std::span<const double> params) {
    if (params.size() != param_count(c))
        throw Error(ErrorKind::shape, "parameter vector length mismatch");
    std::size_t k = 0;
    for (auto& l : c.layers) {
        for (double& w : l.weights.data()) w = params[k++];
        for (double& b : l.bias) b = params[k++];
    }
}

double loss_and_gradient(const Classifier& c, const Matrix& X, const std::vector<int>& y,
                         std::vector<double>& grad, const DropoutMasks* masks) {
    const std::size_t n = X.rows();
    if (y.size() != n) throw Error(ErrorKind::shape, "label count does not match rows");
    if (n == 0) throw Error(ErrorKind::shape, "empty batch");
    ForwardState st = forward(c, X, masks);

    // CE(z,y) = softplus(z) - y*z, dCE/dz = sigmoid(z) - y
    double loss = 0.0;
    const Matrix& zout = st.activations.back();
    Matrix delta(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = zout(i, 0);
        loss += softplus(z) - static_cast<double>(y[i]) * z;
        delta(i, 0) = (sigmoid(z) - static_cast<double>(y[i])) / static_cast<double>(n);
    }
    loss /= static_cast<double>(n);
    for (const auto& l : c.layers)
        for (double w : l.weights.data()) loss += c.hp.l2 * w * w;

    grad.assign(param_count(c), 0.0);
    // Walk layers backwards; `delta` holds dLoss/dz for the current layer.
    std::vector<std::size_t> offsets(c.layers.size());
    std::size_t off = 0;
    for (std::size_t l = 0; l < c.layers.size(); ++l) {
        offsets[l] = off;
        off += c.layers[l].weights.data().size() + c.layers[l].bias.size();
    }
    for (std::size_t li = c.layers.size(); li-- > 0;) {
        const Layer& layer = c.layers[li];
        const Matrix& a_in = st.activations[li];
        const std::size_t in = layer.weights.rows();
        const std::size_t out = layer.weights.cols();
        double* gw = grad.data() + offsets[li];
        double* gb = gw + in * out;
        for (std::size_t i = 0; i < n; ++i) {
            auto ai = a_in.row(i);
            for (std::size_t o = 0; o < out; ++o) {
                const double dz = delta(i, o);
                if (dz == 0.0) continue;
                for (std::size_t j = 0; j < in; ++j) gw[j * out + o] += ai[j] * dz;
                gb[o] += dz;
            }
        }
        for (std::size_t j = 0; j < in * out; ++j)
            gw[j] += 2.0 * c.hp.l2 * layer.weights.data()[j];

        if (li > 0) {
            // delta_prev = (delta * W^T) masked by dropout and ReLU slope
            Matrix prev(n, in);
            const Matrix& z_prev = st.pre[li - 1];
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < in; ++j) {
                    double acc = 0.0;
                    for (std::size_t o = 0; o < out; ++o)
                        acc += delta(i, o) * layer.weights(j, o);
                    if (masks != nullptr) acc *= (*masks)[li - 1](i, j);
                    prev(i, j) = z_prev(i, j) > 0.0 ? acc : 0.0;
                }
            }
            delta = std::move(prev);
        }
    }
    return loss;
}

double loss_only(const Classifier& c, const Matrix& X, const std::vector<int>& y,
                 const DropoutMasks* masks) {
    const std::size_t n = X.rows();
    ForwardState st = forward(c, X, masks);
    double loss = 0.0;
    const Matrix& zout = st.activations.back();
    for (std::size_t i = 0; i < n; ++i) {
        const double z = zout(i, 0);
        loss += softplus(z) - static_cast<double>(y[i]) * z;
    }
    loss /= static_cast<double>(n);
    for (const auto& l : c.layers)
        for (double w : l.weights.data()) loss += c.hp.l2 * w * w;
    return loss;
}

}  // namespace model_detail

Classifier train_on(const Matrix& X, const std::vector<int>& y, ModelKind kind,
                    const HyperParams& hp, rng::Seed seed) {
    hp.validate();
    if (X.rows() == 0) throw Error(ErrorKind::data, "training set is empty");
    if (y.size() != X.rows()) throw Error(ErrorKind::shape, "label count does not match rows");
    Classifier c = init_classifier(X.cols(), kind, hp, seed);

    rng::Engine dropout_eng(rng::derive(seed, {rng::hash_str("dropout")}));
    std::vector<std::size_t> order(X.rows());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad;
    std::vector<double> params = model_detail::flatten_params(c);

    const bool use_dropout = kind == ModelKind::mlp2 && c.hp.dropout > 0.0;
    const double keep = 1.0 - c.hp.dropout;

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        rng::Engine shuffle_eng(
            rng::derive(seed, {rng::hash_str("shuffle"), static_cast<rng::Seed>(epoch)}));
        shuffle_eng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += kBatchSize) {
            const std::size_t bsz = std::min(kBatchSize, order.size() - start);
            Matrix Xb(bsz, X.cols());
            std::vector<int> yb(bsz);
            for (std::size_t i = 0; i < bsz; ++i) {
                Xb.set_row(i, X.row(order[start + i]));
                yb[i] = y[order[start + i]];
            }
            model_detail::DropoutMasks masks;
            if (use_dropout) {
                for (std::size_t l = 0; l + 1 < c.layers.size(); ++l) {
                    Matrix m(bsz, c.layers[l].weights.cols());
                    for (double& v : m.data())
                        v = dropout_eng.bernoulli(keep) ? 1.0 / keep : 0.0;
                    masks.push_back(std::move(m));
                }
            }
            const double loss = model_detail::loss_and_gradient(
                c, Xb, yb, grad, use_dropout ? &masks : nullptr);
            if (!std::isfinite(loss))
                throw TrainingError(epoch, "loss became non-finite at epoch " +
                                               std::to_string(epoch));
            for (std::size_t k = 0; k < params.size(); ++k)
                params[k] -= hp.learning_rate * grad[k];
            model_detail::unflatten_params(c, params);
        }
    }
    for (double p : params)
        if (!std::isfinite(p))
            throw TrainingError(hp.epochs - 1, "weights became non-finite");
    return c;
}

Classifier train(const TabularDataset& ds, ModelKind kind, const HyperParams& hp,
                 rng::Seed seed) {
    const auto rows = ds.indices(Split::train);
    if (rows.empty()) throw Error(ErrorKind::data, "train split is empty");
    Matrix X = ds.features_of(rows);
    std::vector<int> y = ds.labels_of(rows);
    return train_on(X, y, kind, hp, seed);
}

}  // namespace uef
