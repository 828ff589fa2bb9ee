#include "aclab/decay_fit.hpp"

#include "aclab/error.hpp"

#include <cmath>

namespace aclab {

DecayFit fit_decay_exponent(std::span<const double> r, std::span<const double> value, double r_min,
                            double r_max) {
    if (r.size() != value.size()) throw InvalidArgument("fit_decay_exponent: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < r_min || r[i] > r_max) continue;
        if (!(value[i] > 0.0))
            throw InvalidArgument("fit_decay_exponent: nonpositive value in window");
        lx.push_back(std::log(r[i]));
        ly.push_back(std::log(value[i]));
    }
    if (lx.size() < 10) throw InvalidArgument("fit_decay_exponent: fewer than 10 points in window");

    // Centered normal equations keep the slope well conditioned.
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("fit_decay_exponent: window has a single abscissa");
    DecayFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.amplitude = std::exp(intercept);
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (intercept + fit.exponent * lx[i]);
        ss += e * e;
    }
    fit.fit_residual = std::sqrt(ss / n);
    fit.points = lx.size();
    return fit;
}

DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& series, double r_min,
                            double r_max) {
    std::vector<double> r, v;
    r.reserve(series.size());
    v.reserve(series.size());
    for (const auto& [ri, vi] : series) {
        r.push_back(ri);
        v.push_back(vi);
    }
    return fit_decay_exponent(r, v, r_min, r_max);
}

}  // namespace aclab
