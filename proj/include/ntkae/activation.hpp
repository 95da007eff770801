#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ntkae {

enum class ActKind { sigmoid, erf_scaled_sigmoid, erf, tanh, linear };

// Activation family with exact derivatives up to third order.
// alpha/beta are only meaningful for the linear kind.
struct Activation {
    ActKind kind = ActKind::sigmoid;
    double alpha = 1.0;
    double beta = 0.0;

    static Activation sigmoid() { return {ActKind::sigmoid}; }
    static Activation erf_scaled_sigmoid() { return {ActKind::erf_scaled_sigmoid}; }
    static Activation erf() { return {ActKind::erf}; }
    static Activation tanh() { return {ActKind::tanh}; }
    static Activation linear(double alpha, double beta) {
        return {ActKind::linear, alpha, beta};
    }

    double eval(int order, double x) const;

    double operator()(double x) const { return eval(0, x); }
};

inline double sigmoid_value(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double Activation::eval(int order, double x) const {
    if (order < 0 || order > 3) {
        throw std::invalid_argument("Activation::eval: order must be in 0..3, got " +
                                    std::to_string(order));
    }
    constexpr double inv_sqrt_pi = 0.5641895835477562869;  // 1/sqrt(pi)
    switch (kind) {
        case ActKind::sigmoid: {
            const double s = sigmoid_value(x);
            const double d = s * (1.0 - s);
            switch (order) {
                case 0: return s;
                case 1: return d;
                case 2: return d * (1.0 - 2.0 * s);
                default: return d * (1.0 - 6.0 * s + 6.0 * s * s);
            }
        }
        case ActKind::erf_scaled_sigmoid: {
            // 0.5 * erf(x/2) + 0.5
            const double g = 0.5 * inv_sqrt_pi * std::exp(-0.25 * x * x);
            switch (order) {
                case 0: return 0.5 * std::erf(0.5 * x) + 0.5;
                case 1: return g;
                case 2: return -0.5 * x * g;
                default: return (0.25 * x * x - 0.5) * g;
            }
        }
        case ActKind::erf: {
            const double g = 2.0 * inv_sqrt_pi * std::exp(-x * x);
            switch (order) {
                case 0: return std::erf(x);
                case 1: return g;
                case 2: return -2.0 * x * g;
                default: return (4.0 * x * x - 2.0) * g;
            }
        }
        case ActKind::tanh: {
            const double t = std::tanh(x);
            const double d = 1.0 - t * t;
            switch (order) {
                case 0: return t;
                case 1: return d;
                case 2: return -2.0 * t * d;
                default: return -2.0 * d * (1.0 - 3.0 * t * t);
            }
        }
        case ActKind::linear:
            switch (order) {
                case 0: return alpha * x + beta;
                case 1: return alpha;
                default: return 0.0;
            }
    }
    throw std::logic_error("Activation::eval: unknown kind");
}

inline const char* to_name(ActKind kind) {
    switch (kind) {
        case ActKind::sigmoid: return "sigmoid";
        case ActKind::erf_scaled_sigmoid: return "erf_scaled_sigmoid";
        case ActKind::erf: return "erf";
        case ActKind::tanh: return "tanh";
        case ActKind::linear: return "linear";
    }
    return "unknown";
}

inline Activation activation_from_name(const std::string& name, double alpha = 1.0,
                                        double beta = 0.0) {
    if (name == "sigmoid") return Activation::sigmoid();
    if (name == "erf_scaled_sigmoid") return Activation::erf_scaled_sigmoid();
    if (name == "erf") return Activation::erf();
    if (name == "tanh") return Activation::tanh();
    if (name == "linear") return Activation::linear(alpha, beta);
    throw std::invalid_argument("unknown activation: " + name);
}

}  // namespace ntkae
