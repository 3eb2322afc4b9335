#include "osil/diff/mlp.hpp"

#include <cmath>
#include <cstring>

#include "osil/simd/kernels.hpp"

namespace osil {

namespace {

double checked_sum(std::span<const double> x) {
    return simd::active().sum(x.data(), x.size());
}

// Dense layer application: out = W x + b, W row-major (rows x cols).
void matvec_bias(const double* w, const double* b, const double* x, double* out, int rows,
                 int cols) {
    const simd::Kernels& k = simd::active();
    for (int i = 0; i < rows; ++i) {
        out[i] = k.dot(w + static_cast<std::size_t>(i) * cols, x, cols) + b[i];
    }
}

}  // namespace

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::kTanh;
    if (s == "relu") return Activation::kRelu;
    throw ConfigError("unknown activation: " + s);
}

std::string to_string(Activation a) {
    return a == Activation::kTanh ? "tanh" : "relu";
}

OutputTransform output_transform_from_string(const std::string& s) {
    if (s == "identity") return OutputTransform::kIdentity;
    if (s == "sigmoid") return OutputTransform::kSigmoid;
    if (s == "unit_normalize") return OutputTransform::kUnitNormalize;
    throw ConfigError("unknown output transform: " + s);
}

std::string to_string(OutputTransform t) {
    switch (t) {
        case OutputTransform::kIdentity: return "identity";
        case OutputTransform::kSigmoid: return "sigmoid";
        default: return "unit_normalize";
    }
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation act, OutputTransform transform, std::string name)
    : sizes_(std::move(layer_sizes)), act_(act), transform_(transform), name_(std::move(name)) {
    if (sizes_.size() < 2) throw ConfigError("Mlp " + name_ + ": need at least [in, out] sizes");
    for (int s : sizes_) {
        if (s <= 0) throw ConfigError("Mlp " + name_ + ": layer sizes must be positive");
    }
    for (int l = 0; l + 1 < static_cast<int>(sizes_.size()); ++l) {
        params_.add(name_ + ".w" + std::to_string(l), {sizes_[l + 1], sizes_[l]});
        params_.add(name_ + ".b" + std::to_string(l), {sizes_[l + 1]});
    }
}

void Mlp::init_glorot(Rng& rng) {
    for (int l = 0; l < num_layers(); ++l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::span<double> w = params_.slice(2 * l);
        for (double& v : w) v = rng.uniform(-limit, limit);
        std::span<double> b = params_.slice(2 * l + 1);
        for (double& v : b) v = 0.0;
    }
}

void Mlp::forward(std::span<const double> input, MlpWorkspace& ws) const {
    if (static_cast<int>(input.size()) != input_dim()) {
        throw DataError("Mlp " + name_ + ": input size " + std::to_string(input.size()) +
                        " != " + std::to_string(input_dim()));
    }
    const int L = num_layers();
    ws.acts.resize(L + 1);
    ws.acts[0].assign(input.begin(), input.end());
    for (int l = 0; l < L; ++l) {
        const int rows = sizes_[l + 1];
        const int cols = sizes_[l];
        ws.acts[l + 1].resize(rows);
        matvec_bias(params_.data() + weight_offset(l), params_.data() + bias_offset(l),
                    ws.acts[l].data(), ws.acts[l + 1].data(), rows, cols);
        if (l < L - 1) {
            double* a = ws.acts[l + 1].data();
            if (act_ == Activation::kTanh) {
                for (int i = 0; i < rows; ++i) a[i] = std::tanh(a[i]);
            } else {
                for (int i = 0; i < rows; ++i) a[i] = a[i] > 0.0 ? a[i] : 0.0;
            }
        }
    }
    const std::vector<double>& raw = ws.acts[L];
    ws.out.resize(raw.size());
    switch (transform_) {
        case OutputTransform::kIdentity:
            ws.out = raw;
            break;
        case OutputTransform::kSigmoid:
            for (std::size_t i = 0; i < raw.size(); ++i) ws.out[i] = 1.0 / (1.0 + std::exp(-raw[i]));
            break;
        case OutputTransform::kUnitNormalize: {
            double n = std::sqrt(simd::active().sum_sq(raw.data(), raw.size()));
            // Guard against an exactly-zero raw vector; inputs are built so this
            // does not happen in practice.
            ws.raw_norm = n > 1e-30 ? n : 1e-30;
            for (std::size_t i = 0; i < raw.size(); ++i) ws.out[i] = raw[i] / ws.raw_norm;
            break;
        }
    }
}

void Mlp::backward(const MlpWorkspace& ws, std::span<const double> grad_out,
                   std::span<double> pgrad, std::span<double> input_grad) const {
    const int L = num_layers();
    if (static_cast<int>(grad_out.size()) != output_dim()) {
        throw DataError("Mlp " + name_ + ": grad_out size mismatch");
    }
    if (!pgrad.empty() && pgrad.size() != params_.size()) {
        throw DataError("Mlp " + name_ + ": pgrad size mismatch");
    }
    const simd::Kernels& k = simd::active();

    // Transform backward: h = dL/draw.
    std::vector<double> h(output_dim());
    switch (transform_) {
        case OutputTransform::kIdentity:
            h.assign(grad_out.begin(), grad_out.end());
            break;
        case OutputTransform::kSigmoid:
            for (int i = 0; i < output_dim(); ++i) {
                h[i] = grad_out[i] * ws.out[i] * (1.0 - ws.out[i]);
            }
            break;
        case OutputTransform::kUnitNormalize: {
            const double zg = k.dot(ws.out.data(), grad_out.data(), ws.out.size());
            for (int i = 0; i < output_dim(); ++i) {
                h[i] = (grad_out[i] - zg * ws.out[i]) / ws.raw_norm;
            }
            break;
        }
    }

    std::vector<double> delta, h_prev;
    for (int l = L - 1; l >= 0; --l) {
        const int rows = sizes_[l + 1];
        const int cols = sizes_[l];
        delta.assign(h.begin(), h.end());
        if (l < L - 1) {
            const double* post = ws.acts[l + 1].data();
            if (act_ == Activation::kTanh) {
                for (int i = 0; i < rows; ++i) delta[i] *= 1.0 - post[i] * post[i];
            } else {
                for (int i = 0; i < rows; ++i) delta[i] *= post[i] > 0.0 ? 1.0 : 0.0;
            }
        }
        if (!std::isfinite(checked_sum(delta))) {
            throw NumericError("Mlp " + name_ + ": non-finite gradient at layer " +
                               std::to_string(l));
        }
        const double* x = ws.acts[l].data();
        if (!pgrad.empty()) {
            double* gw = pgrad.data() + weight_offset(l);
            for (int i = 0; i < rows; ++i) {
                k.axpy(delta[i], x, gw + static_cast<std::size_t>(i) * cols, cols);
            }
            double* gb = pgrad.data() + bias_offset(l);
            for (int i = 0; i < rows; ++i) gb[i] += delta[i];
        }
        const bool need_prev = l > 0 || !input_grad.empty();
        if (need_prev) {
            h_prev.assign(cols, 0.0);
            const double* w = params_.data() + weight_offset(l);
            for (int i = 0; i < rows; ++i) {
                k.axpy(delta[i], w + static_cast<std::size_t>(i) * cols, h_prev.data(), cols);
            }
            h = h_prev;
        }
    }
    if (!input_grad.empty()) {
        if (static_cast<int>(input_grad.size()) != input_dim()) {
            throw DataError("Mlp " + name_ + ": input_grad size mismatch");
        }
        std::copy(h.begin(), h.end(), input_grad.begin());
    }
}

double Mlp::input_grad_norm_sq_backward(std::span<const double> input, double delta,
                                        double delta_prime, std::span<double> pgrad,
                                        MlpWorkspace& ws) const {
    if (output_dim() != 1 || transform_ != OutputTransform::kIdentity) {
        throw ConfigError("Mlp " + name_ +
                          ": input_grad_norm_sq_backward needs a scalar identity-output net");
    }
    if (pgrad.size() != params_.size()) {
        throw DataError("Mlp " + name_ + ": pgrad size mismatch");
    }
    const int L = num_layers();
    const simd::Kernels& k = simd::active();

    // Plain reverse pass to obtain g = dL/dinput.
    forward(input, ws);
    ws.input_grad.resize(input_dim());
    const double go[1] = {delta};
    backward(ws, {go, 1}, {}, ws.input_grad);
    const std::vector<double>& g = ws.input_grad;
    const double norm_sq = k.sum_sq(g.data(), g.size());

    // Forward-over-reverse with input tangent v = g (held constant): the
    // tangent of each parameter gradient is d/deps [dL/dtheta](x + eps*v),
    // and d(|g|^2)/dtheta = 2 * that tangent, since |g|^2 = d/deps L(x+eps*g).
    ws.acts_dot.resize(L + 1);
    ws.acts_dot[0].assign(g.begin(), g.end());
    for (int l = 0; l < L; ++l) {
        const int rows = sizes_[l + 1];
        const int cols = sizes_[l];
        ws.acts_dot[l + 1].assign(rows, 0.0);
        const double* w = params_.data() + weight_offset(l);
        double* pd = ws.acts_dot[l + 1].data();
        const double* xd = ws.acts_dot[l].data();
        for (int i = 0; i < rows; ++i) {
            pd[i] = k.dot(w + static_cast<std::size_t>(i) * cols, xd, cols);
        }
        if (l < L - 1) {
            const double* post = ws.acts[l + 1].data();
            if (act_ == Activation::kTanh) {
                for (int i = 0; i < rows; ++i) pd[i] *= 1.0 - post[i] * post[i];
            } else {
                for (int i = 0; i < rows; ++i) pd[i] *= post[i] > 0.0 ? 1.0 : 0.0;
            }
        }
    }
    const double raw_dot = ws.acts_dot[L][0];

    // Reverse pass carrying (value, tangent) pairs for the adjoints.
    ws.scratch_h.assign(1, delta);
    ws.scratch_h_dot.assign(1, delta_prime * raw_dot);
    std::vector<double>& h = ws.scratch_h;
    std::vector<double>& h_dot = ws.scratch_h_dot;
    std::vector<double>& dl = ws.scratch_delta;
    std::vector<double>& dl_dot = ws.scratch_delta_dot;
    std::vector<double> h_prev, h_prev_dot;
    for (int l = L - 1; l >= 0; --l) {
        const int rows = sizes_[l + 1];
        const int cols = sizes_[l];
        dl.assign(h.begin(), h.end());
        dl_dot.assign(h_dot.begin(), h_dot.end());
        if (l < L - 1) {
            const double* post = ws.acts[l + 1].data();
            const double* post_dot = ws.acts_dot[l + 1].data();
            if (act_ == Activation::kTanh) {
                for (int i = 0; i < rows; ++i) {
                    const double sp = 1.0 - post[i] * post[i];
                    // d/deps of sp is -2 * post * post_dot.
                    dl_dot[i] = dl_dot[i] * sp + dl[i] * (-2.0 * post[i] * post_dot[i]);
                    dl[i] *= sp;
                }
            } else {
                for (int i = 0; i < rows; ++i) {
                    const double sp = post[i] > 0.0 ? 1.0 : 0.0;
                    dl_dot[i] *= sp;
                    dl[i] *= sp;
                }
            }
        }
        const double* x = ws.acts[l].data();
        const double* x_dot = ws.acts_dot[l].data();
        double* gw = pgrad.data() + weight_offset(l);
        double* gb = pgrad.data() + bias_offset(l);
        for (int i = 0; i < rows; ++i) {
            double* row = gw + static_cast<std::size_t>(i) * cols;
            k.axpy(2.0 * dl_dot[i], x, row, cols);
            k.axpy(2.0 * dl[i], x_dot, row, cols);
            gb[i] += 2.0 * dl_dot[i];
        }
        if (l > 0) {
            h_prev.assign(cols, 0.0);
            h_prev_dot.assign(cols, 0.0);
            const double* w = params_.data() + weight_offset(l);
            for (int i = 0; i < rows; ++i) {
                const double* row = w + static_cast<std::size_t>(i) * cols;
                k.axpy(dl[i], row, h_prev.data(), cols);
                k.axpy(dl_dot[i], row, h_prev_dot.data(), cols);
            }
            h = h_prev;
            h_dot = h_prev_dot;
        }
    }
    return norm_sq;
}

}  // namespace osil
