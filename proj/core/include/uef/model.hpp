#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "uef/common.hpp"
#include "uef/dataset.hpp"
#include "uef/rng.hpp"

namespace uef {

// Anything that maps feature rows to positive-class probabilities. The
// explainers and the stability pipeline only ever see this interface.
class Predictor {
public:
    virtual ~Predictor() = default;
    [[nodiscard]] virtual std::size_t feature_count() const = 0;
    [[nodiscard]] virtual std::vector<double> predict_proba(const Matrix& X) const = 0;

    [[nodiscard]] double predict_proba_one(std::span<const double> x) const {
        Matrix m(1, x.size());
        m.set_row(0, x);
        return predict_proba(m)[0];
    }
};

// Adapter for tests and ad-hoc probes.
class FunctionPredictor final : public Predictor {
public:
    using Fn = std::function<double(std::span<const double>)>;
    FunctionPredictor(std::size_t d, Fn fn) : d_(d), fn_(std::move(fn)) {}

    [[nodiscard]] std::size_t feature_count() const override { return d_; }
    [[nodiscard]] std::vector<double> predict_proba(const Matrix& X) const override {
        std::vector<double> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) out[i] = fn_(X.row(i));
        return out;
    }

private:
    std::size_t d_;
    Fn fn_;
};

struct HyperParams {
    double threshold = 0.5;       // in (0,1)
    double l2 = 0.0;              // >= 0
    double learning_rate = 0.01;  // > 0
    int epochs = 50;              // >= 1
    double dropout = 0.0;         // in [0,1)

    void validate() const;
    bool operator==(const HyperParams&) const = default;
};

enum class ModelKind { logistic, mlp2 };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct Layer {
    Matrix weights;               // fan_in x fan_out
    std::vector<double> bias;     // fan_out
    bool operator==(const Layer&) const = default;
};

// Feed-forward classifier: logistic (no hidden layers) or two ReLU hidden
// layers of widths 32 and 16, sigmoid output.
class Classifier final : public Predictor {
public:
    ModelKind kind = ModelKind::logistic;
    HyperParams hp;
    rng::Seed train_seed = 0;
    std::vector<Layer> layers;

    [[nodiscard]] std::size_t feature_count() const override {
        return layers.empty() ? 0 : layers.front().weights.rows();
    }

    // Batched forward pass, dropout disabled.
    [[nodiscard]] std::vector<double> predict_proba(const Matrix& X) const override;

    // label = 1 iff probability >= hp.threshold
    [[nodiscard]] std::vector<int> predict_label(const Matrix& X) const;

    bool operator==(const Classifier& o) const {
        return kind == o.kind && hp == o.hp && train_seed == o.train_seed && layers == o.layers;
    }
};

inline constexpr std::size_t kMlpHiddenWidths[2] = {32, 16};
inline constexpr std::size_t kBatchSize = 32;

// Architecture with seeded uniform +-sqrt(6/(fan_in+fan_out)) init, untrained.
Classifier init_classifier(std::size_t d, ModelKind kind, const HyperParams& hp,
                           rng::Seed seed);

// Mini-batch SGD on cross-entropy + l2*||W||^2 over the train split.
// Deterministic for fixed (ds, kind, hp, seed). Throws TrainingError with the
// failing epoch if the loss goes non-finite.
Classifier train(const TabularDataset& ds, ModelKind kind, const HyperParams& hp,
                 rng::Seed seed);

// Same, on explicit rows; what `train` delegates to.
Classifier train_on(const Matrix& X, const std::vector<int>& y, ModelKind kind,
                    const HyperParams& hp, rng::Seed seed);

namespace model_detail {

// Inverted-scaling dropout masks per hidden layer: entries are 0 or 1/(1-p).
using DropoutMasks = std::vector<Matrix>;

std::vector<double> flatten_params(const Classifier& c);
void unflatten_params(Classifier& c, std::span<const double> params);

// Loss (mean cross-entropy + l2 * sum of squared weights, biases excluded)
// and its gradient in flatten_params layout. `masks` may be null.
double loss_and_gradient(const Classifier& c, const Matrix& X, const std::vector<int>& y,
                         std::vector<double>& grad, const DropoutMasks* masks = nullptr);

double loss_only(const Classifier& c, const Matrix& X, const std::vector<int>& y,
                 const DropoutMasks* masks = nullptr);

}  // namespace model_detail

}  // namespace uef
