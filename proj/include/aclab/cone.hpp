#pragma once

#include <complex>
#include <string>
#include <vector>

namespace aclab {

/// Link S^{n1}(rho1) x S^{n2}(rho2) of the cone C_{n1,n2} in R^{n+1}, n = n1 + n2 + 1.
struct LinkSpec {
    int n1 = 3;
    int n2 = 3;

    /// Dimension of the ambient sphere S^n containing the link.
    int n() const noexcept { return n1 + n2 + 1; }
    /// Throws InvalidArgument unless n1, n2 >= 1.
    void validate() const;
    bool operator==(const LinkSpec&) const = default;
};

struct LinkGeometry {
    double rho1 = 0.0;
    double rho2 = 0.0;
    /// Mean curvature of the link in S^n, n1 rho2/rho1 - n2 rho1/rho2.
    double traceH = 0.0;
    /// |A|^2 of the link, equal to n - 1.
    double normA2 = 0.0;
};

LinkGeometry link_geometry(const LinkSpec& spec);

/// One eigenspace of -(Delta + |A|^2) on the link, built from the sphere
/// harmonics of degree a on S^{n1} and degree b on S^{n2}.
struct LinkMode {
    double mu = 0.0;
    int a = 0;
    int b = 0;
    long multiplicity = 1;
};

/// Dimension of the space of degree-a spherical harmonics on S^k.
long sphere_harmonic_dimension(int k, int a);

/// The jmax lowest modes, ascending in mu, ties broken by (a, b).
std::vector<LinkMode> link_eigenvalues(const LinkSpec& spec, int jmax);

enum class Stability { unstable, stable, strictly_stable };

std::string to_string(Stability s);

/// Stability class of a cone whose link has lowest eigenvalue mu0. The
/// threshold is -((n-2)/2)^2: the discriminant of the characteristic equation.
Stability classify_from_mu0(double mu0, int n);

Stability classify_stability(const LinkSpec& spec);

struct CharacteristicRoots {
    std::complex<double> gamma_plus;
    std::complex<double> gamma_minus;
    /// Real parts of the characteristic roots.
    double nu_plus = 0.0;
    double nu_minus = 0.0;
    bool complex_pair = false;
    bool repeated = false;
};

/// Roots of gamma^2 + (n - 2) gamma - mu = 0.
CharacteristicRoots characteristic_roots(double mu, int n);

struct ConeSpectrumEntry {
    LinkMode mode;
    CharacteristicRoots roots;
};

struct ConeSpectrum {
    LinkSpec spec;
    std::vector<ConeSpectrumEntry> entries;
    Stability stability = Stability::unstable;

    const CharacteristicRoots& level0() const { return entries.front().roots; }
};

ConeSpectrum cone_spectrum(const LinkSpec& spec, int jmax);

/// Polar angle of the cone ray in the (|x|, |y|) quadrant: arctan(sqrt(n2 / n1)).
double cone_angle(const LinkSpec& spec);

}  // namespace aclab
