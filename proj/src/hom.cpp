#include "entsim/hom.hpp"

#include "entsim/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entsim::hom {

namespace {

void check_curve(const HomCurve& c)
{
    if (c.delays.size() != c.counts.size())
        throw std::invalid_argument("HomCurve: delays/counts length mismatch");
    if (c.count_errors && c.count_errors->size() != c.counts.size())
        throw std::invalid_argument("HomCurve: error list length mismatch");
    if (c.delays.size() < 5)
        throw std::invalid_argument("HomCurve: need at least 5 points");
    for (double y : c.counts)
        if (!(y >= 0.0) || !std::isfinite(y))
            throw std::invalid_argument("HomCurve: counts must be non-negative");
    if (c.count_errors)
        for (double e : *c.count_errors)
            if (!(e > 0.0))
                throw std::invalid_argument("HomCurve: errors must be positive");
}

void check_fit_params(const HomFit& f)
{
    if (!(f.baseline > 0.0))
        throw std::invalid_argument("HomFit: baseline must be positive");
    if (!(f.visibility >= 0.0) || f.visibility > 1.0)
        throw std::invalid_argument("HomFit: visibility must be in [0, 1]");
    if (!(f.width > 0.0))
        throw std::invalid_argument("HomFit: width must be positive");
    if (!std::isfinite(f.center))
        throw std::invalid_argument("HomFit: center must be finite");
}

// model and its analytic gradient in (baseline, visibility, center, width)
struct ModelPoint {
    double value;
    Eigen::Vector4d gradient;
};

ModelPoint eval_model(const Eigen::Vector4d& p, double delay)
{
    const double b = p(0);
    const double v = p(1);
    const double c = p(2);
    const double w = p(3);
    const double u = (delay - c) / w;
    const double g = std::exp(-0.5 * u * u);

    ModelPoint out;
    out.value = b * (1.0 - v * g);
    out.gradient(0) = 1.0 - v * g;
    out.gradient(1) = -b * g;
    out.gradient(2) = -b * v * g * u / w;
    out.gradient(3) = -b * v * g * u * u / w;
    return out;
}

} // namespace

double hom_model(const HomFit& f, double delay)
{
    check_fit_params(f);
    double u = (delay - f.center) / f.width;
    return f.baseline * (1.0 - f.visibility * std::exp(-0.5 * u * u));
}

HomFit fit_gaussian_dip(const HomCurve& c)
{
    check_curve(c);
    const std::size_t m = c.counts.size();

    double max_count = *std::max_element(c.counts.begin(), c.counts.end());
    double min_count = *std::min_element(c.counts.begin(), c.counts.end());
    if (!(min_count < 0.9 * max_count))
        throw std::runtime_error("fit_gaussian_dip: data has no dip");

    std::vector<double> weights(m, 1.0);
    if (c.count_errors)
        for (std::size_t i = 0; i < m; ++i)
            weights[i] = 1.0 / ((*c.count_errors)[i] * (*c.count_errors)[i]);

    auto [min_it, max_it] = std::minmax_element(c.delays.begin(), c.delays.end());
    std::size_t argmin =
        std::min_element(c.counts.begin(), c.counts.end()) - c.counts.begin();

    Eigen::Vector4d p;
    p(0) = max_count;
    p(1) = 1.0 - min_count / max_count;
    p(2) = c.delays[argmin];
    p(3) = 0.25 * (*max_it - *min_it);
    if (!(p(3) > 0.0))
        throw std::runtime_error("fit_gaussian_dip: degenerate delay grid");

    auto cost = [&](const Eigen::Vector4d& params) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double r = eval_model(params, c.delays[i]).value - c.counts[i];
            s += weights[i] * r * r;
        }
        return s;
    };

    double lambda = 1e-3;
    double current = cost(p);
    bool converged = false;
    for (int iter = 0; iter < 500 && !converged; ++iter) {
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        for (std::size_t i = 0; i < m; ++i) {
            ModelPoint mp = eval_model(p, c.delays[i]);
            double r = mp.value - c.counts[i];
            jtj += weights[i] * mp.gradient * mp.gradient.transpose();
            jtr += weights[i] * r * mp.gradient;
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::Matrix4d damped = jtj;
            for (int k = 0; k < 4; ++k)
                damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            Eigen::Vector4d step = damped.ldlt().solve(-jtr);
            Eigen::Vector4d trial = p + step;
            double trial_cost = cost(trial);
            if (std::isfinite(trial_cost) && trial_cost <= current) {
                double rel_step = 0.0;
                for (int k = 0; k < 4; ++k)
                    rel_step = std::max(rel_step,
                                        std::abs(step(k)) / std::max(std::abs(p(k)), 1e-12));
                p = trial;
                current = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (rel_step < 1e-8)
                    converged = true;
                break;
            }
            lambda *= 3.0;
            if (lambda > 1e14)
                break;
        }
        if (!accepted)
            break;
    }
    if (!converged)
        throw std::runtime_error("fit_gaussian_dip: no convergence within 500 iterations");

    HomFit fit;
    fit.baseline = p(0);
    fit.visibility = std::clamp(p(1), 0.0, 1.0);
    fit.center = p(2);
    fit.width = std::abs(p(3));
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double r = hom_model(fit, c.delays[i]) - c.counts[i];
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(m));
    check_fit_params(fit);
    return fit;
}

HomCurve simulate_hom_scan(const HomFit& f, const std::vector<double>& delays,
                           std::uint64_t rng_seed)
{
    check_fit_params(f);
    rng::Engine eng = rng::make_engine(rng_seed);

    HomCurve out;
    out.delays = delays;
    out.counts.reserve(delays.size());
    std::vector<double> errors;
    errors.reserve(delays.size());
    for (double d : delays) {
        double n = static_cast<double>(rng::poisson(eng, hom_model(f, d)));
        out.counts.push_back(n);
        errors.push_back(std::sqrt(std::max(n, 1.0)));
    }
    out.count_errors = std::move(errors);
    return out;
}

} // namespace entsim::hom
