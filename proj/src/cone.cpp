#include "aclab/cone.hpp"

#include "aclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace aclab {

namespace {

long binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

void LinkSpec::validate() const {
    if (n1 < 1 || n2 < 1) throw InvalidArgument("LinkSpec: n1 and n2 must be >= 1");
}

LinkGeometry link_geometry(const LinkSpec& spec) {
    spec.validate();
    const double nm1 = spec.n() - 1;
    LinkGeometry g;
    g.rho1 = std::sqrt(spec.n1 / nm1);
    g.rho2 = std::sqrt(spec.n2 / nm1);
    g.traceH = spec.n1 * g.rho2 / g.rho1 - spec.n2 * g.rho1 / g.rho2;
    const double r21 = g.rho2 / g.rho1;
    g.normA2 = r21 * r21 * spec.n1 + spec.n2 / (r21 * r21);
    return g;
}

long sphere_harmonic_dimension(int k, int a) {
    if (a < 0) return 0;
    return binomial(a + k, k) - binomial(a + k - 2, k);
}

std::vector<LinkMode> link_eigenvalues(const LinkSpec& spec, int jmax) {
    spec.validate();
    if (jmax < 1) throw InvalidArgument("link_eigenvalues: jmax must be >= 1");
    const LinkGeometry g = link_geometry(spec);
    const double nm1 = spec.n() - 1;
    std::vector<LinkMode> modes;
    // mu is increasing in a and in b, so the jmax lowest have a, b < jmax.
    for (int a = 0; a < jmax; ++a) {
        for (int b = 0; b < jmax; ++b) {
            const double la = static_cast<double>(a) * (a + spec.n1 - 1);
            const double lb = static_cast<double>(b) * (b + spec.n2 - 1);
            LinkMode m;
            m.a = a;
            m.b = b;
            m.mu = la / (g.rho1 * g.rho1) + lb / (g.rho2 * g.rho2) - nm1;
            m.multiplicity =
                sphere_harmonic_dimension(spec.n1, a) * sphere_harmonic_dimension(spec.n2, b);
            modes.push_back(m);
        }
    }
    std::sort(modes.begin(), modes.end(), [](const LinkMode& l, const LinkMode& r) {
        // Exact rational values can differ in the last ulp; compare with a guard.
        if (std::abs(l.mu - r.mu) > 1e-12 * std::max(1.0, std::abs(l.mu)))
            return l.mu < r.mu;
        return std::tie(l.a, l.b) < std::tie(r.a, r.b);
    });
    modes.resize(static_cast<std::size_t>(jmax));
    return modes;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::unstable: return "unstable";
        case Stability::stable: return "stable";
        case Stability::strictly_stable: return "strictly_stable";
    }
    return "unknown";
}

Stability classify_from_mu0(double mu0, int n) {
    const double half = (n - 2) / 2.0;
    const double threshold = -half * half;
    if (mu0 > threshold) return Stability::strictly_stable;
    if (mu0 >= threshold) return Stability::stable;
    return Stability::unstable;
}

Stability classify_stability(const LinkSpec& spec) {
    return classify_from_mu0(link_eigenvalues(spec, 1).front().mu, spec.n());
}

CharacteristicRoots characteristic_roots(double mu, int n) {
    const double center = (2.0 - n) / 2.0;
    const double disc = (n - 2) * (n - 2) / 4.0 + mu;
    const double scale = std::max(1.0, std::abs(mu));
    CharacteristicRoots r;
    if (std::abs(disc) <= 1e-12 * scale) {
        r.repeated = true;
        r.gamma_plus = r.gamma_minus = {center, 0.0};
    } else if (disc > 0.0) {
        const double s = std::sqrt(disc);
        r.gamma_plus = {center + s, 0.0};
        r.gamma_minus = {center - s, 0.0};
    } else {
        const double s = std::sqrt(-disc);
        r.complex_pair = true;
        r.gamma_plus = {center, s};
        r.gamma_minus = {center, -s};
    }
    r.nu_plus = r.gamma_plus.real();
    r.nu_minus = r.gamma_minus.real();
    return r;
}

ConeSpectrum cone_spectrum(const LinkSpec& spec, int jmax) {
    ConeSpectrum out;
    out.spec = spec;
    for (const LinkMode& m : link_eigenvalues(spec, jmax))
        out.entries.push_back({m, characteristic_roots(m.mu, spec.n())});
    out.stability = classify_from_mu0(out.entries.front().mode.mu, spec.n());
    return out;
}

double cone_angle(const LinkSpec& spec) {
    spec.validate();
    return std::atan(std::sqrt(static_cast<double>(spec.n2) / spec.n1));
}

}  // namespace aclab
