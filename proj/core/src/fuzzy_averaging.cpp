#include "fuzzproc/fuzzy_averaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fuzzproc {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

struct WindowBounds {
    double lo, hi;
};

WindowBounds uniformBounds(const WaitingTimeDistribution& d) {
    return {std::max(0.0, d.tau - d.fuzziness / 2.0), d.tau + d.fuzziness / 2.0};
}

// Adaptive Simpson for a complex integrand.
struct Quadrature {
    const std::function<Complex(double)>& f;
    double tol;
    int maxDepth;
    double residual = 0.0;
    bool converged = true;

    Complex simpson(double a, double b, Complex fa, Complex fm, Complex fb) const {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    Complex run(double a, double b, Complex fa, Complex fm, Complex fb, Complex whole,
                double tolHere, int depth) {
        const double m = 0.5 * (a + b);
        const Complex fl = f(0.5 * (a + m)), fr = f(0.5 * (m + b));
        const Complex left = simpson(a, m, fa, fl, fm);
        const Complex right = simpson(m, b, fm, fr, fb);
        const double err = std::abs(left + right - whole);
        if (err <= 15.0 * tolHere || depth >= maxDepth) {
            if (depth >= maxDepth && err > 15.0 * tolHere) {
                converged = false;
                residual += err / 15.0;
            }
            return left + right + (left + right - whole) / 15.0;
        }
        return run(a, m, fa, fl, fm, left, 0.5 * tolHere, depth + 1) +
               run(m, b, fm, fr, fb, right, 0.5 * tolHere, depth + 1);
    }

    Complex integrate(double a, double b) {
        const Complex fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        return run(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0);
    }
};

// Half-normal Fourier transform at offset zero:
//   int_0^inf sqrt(2/(pi T)) exp(-s^2/(2T)) exp(-i g s) ds
//     = exp(-a^2) - i (2/sqrt(pi)) D(a),   a = g sqrt(T/2).
Complex halfNormalClosedForm(double gap, double T) {
    const double a = gap * std::sqrt(T / 2.0);
    return Complex(std::exp(-a * a), -2.0 / std::sqrt(kPi) * dawson(a));
}

}  // namespace

std::string familyName(DistributionFamily f) {
    switch (f) {
        case DistributionFamily::UniformWindow: return "uniformWindow";
        case DistributionFamily::HalfNormal: return "halfNormal";
        case DistributionFamily::Delta: return "delta";
    }
    return "?";
}

DistributionFamily familyFromName(const std::string& name) {
    if (name == "uniformWindow") return DistributionFamily::UniformWindow;
    if (name == "halfNormal") return DistributionFamily::HalfNormal;
    if (name == "delta") return DistributionFamily::Delta;
    throw std::invalid_argument("unknown distribution family: " + name);
}

void WaitingTimeDistribution::validate() const {
    if (tau < 0) throw std::invalid_argument("waiting-time distribution: tau must be >= 0");
    if (fuzziness < 0)
        throw std::invalid_argument("waiting-time distribution: fuzziness T must be >= 0");
}

bool WaitingTimeDistribution::clipped() const {
    return family == DistributionFamily::UniformWindow && tau < fuzziness / 2.0;
}

double WaitingTimeDistribution::mean() const {
    switch (family) {
        case DistributionFamily::Delta: return tau;
        case DistributionFamily::UniformWindow: {
            const auto [lo, hi] = uniformBounds(*this);
            return 0.5 * (lo + hi);
        }
        case DistributionFamily::HalfNormal:
            return tau + std::sqrt(2.0 * fuzziness / kPi);
    }
    return tau;
}

double WaitingTimeDistribution::density(double t) const {
    if (t < 0) return 0.0;
    switch (family) {
        case DistributionFamily::Delta:
            throw std::logic_error("delta distribution has no density function");
        case DistributionFamily::UniformWindow: {
            const auto [lo, hi] = uniformBounds(*this);
            if (hi <= lo) throw std::logic_error("uniform window has zero width");
            return (t >= lo && t < hi) ? 1.0 / (hi - lo) : 0.0;
        }
        case DistributionFamily::HalfNormal: {
            if (fuzziness == 0.0) throw std::logic_error("half-normal with T = 0 is a point mass");
            if (t < tau) return 0.0;
            const double s = t - tau;
            return std::sqrt(2.0 / (kPi * fuzziness)) * std::exp(-s * s / (2.0 * fuzziness));
        }
    }
    return 0.0;
}

double dawson(double x) {
    // Rybicki's exponentially convergent sampling series,
    //   D(x) = (1/sqrt(pi)) sum_{n odd} exp(-(x - n h)^2) / n,
    // truncated where the Gaussian factor is below 1e-18.
    const double h = 0.25;
    if (x == 0.0) return 0.0;
    const double ax = std::abs(x);
    const int n0 = 2 * static_cast<int>(std::floor(0.5 * (ax / h + 1.0))) - 1;  // odd, near ax/h
    double sum = 0.0;
    const int span = static_cast<int>(std::ceil(9.0 / h));
    for (int n = n0 - span; n <= n0 + span; n += 2) {
        const double u = ax - n * h;
        sum += std::exp(-u * u) / n;
    }
    const double d = sum / std::sqrt(kPi);
    return x > 0 ? d : -d;
}

Complex gCoefficient(const WaitingTimeDistribution& dist, double gap) {
    dist.validate();
    if (gap == 0.0) return 1.0;

    const bool pointMass = dist.family == DistributionFamily::Delta || dist.fuzziness == 0.0;
    if (pointMass) return std::polar(1.0, -gap * dist.tau);

    switch (dist.family) {
        case DistributionFamily::UniformWindow: {
            const auto [lo, hi] = uniformBounds(dist);
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            return Complex(std::cos(gap * mid), -std::sin(gap * mid)) * sinc(gap * half);
        }
        case DistributionFamily::HalfNormal: {
            const double sigma = std::sqrt(dist.fuzziness);
            std::function<Complex(double)> f = [&](double s) {
                return std::sqrt(2.0 / (kPi * dist.fuzziness)) *
                       std::exp(-s * s / (2.0 * dist.fuzziness)) *
                       std::polar(1.0, -gap * s);
            };
            Quadrature quad{f, 1e-12, 28};
            // Tail beyond 12 sigma carries mass < 1e-30.
            Complex value = 0.0;
            const int panels = std::max(1, static_cast<int>(std::abs(gap) * sigma));
            const double upper = 12.0 * sigma;
            for (int p = 0; p < panels; ++p)
                value += quad.integrate(upper * p / panels, upper * (p + 1) / panels);
            if (!quad.converged) {
                std::ostringstream msg;
                msg << "gCoefficient: half-normal quadrature did not converge, "
                       "residual estimate "
                    << quad.residual;
                throw std::runtime_error(msg.str());
            }
            const Complex closed =
                std::polar(1.0, -gap * dist.tau) * halfNormalClosedForm(gap, dist.fuzziness);
            const Complex shifted = std::polar(1.0, -gap * dist.tau) * value;
            if (std::abs(shifted - closed) > 1e-8) {
                std::ostringstream msg;
                msg << "gCoefficient: half-normal quadrature disagrees with closed form by "
                    << std::abs(shifted - closed);
                throw std::runtime_error(msg.str());
            }
            return shifted;
        }
        case DistributionFamily::Delta:
            break;  // handled above
    }
    throw std::invalid_argument("gCoefficient: unknown distribution family");
}

Matrix PartialDephasingMap::apply(const Matrix& X) const {
    if (X.rows() != spec.dim || X.cols() != spec.dim)
        throw std::invalid_argument("PartialDephasingMap::apply: dimension mismatch");
    if (basis.rows() == spec.dim && basis.cols() == spec.dim)
        return basis * coeffExpanded.cwiseProduct(basis.adjoint() * X * basis) *
               basis.adjoint();
    const int L = spec.levelCount();
    Matrix out = Matrix::Zero(spec.dim, spec.dim);
    for (int n = 0; n < L; ++n) {
        Matrix PnX = spec.projectors[n] * X;
        for (int m = 0; m < L; ++m)
            out.noalias() += coefficients(n, m) * (PnX * spec.projectors[m]);
    }
    return out;
}

Matrix PartialDephasingMap::applyAdjoint(const Matrix& X) const {
    if (basis.rows() == spec.dim && basis.cols() == spec.dim)
        return basis *
               coeffExpanded.conjugate().cwiseProduct(basis.adjoint() * X * basis) *
               basis.adjoint();
    const int L = spec.levelCount();
    Matrix out = Matrix::Zero(spec.dim, spec.dim);
    for (int n = 0; n < L; ++n) {
        Matrix PnX = spec.projectors[n] * X;
        for (int m = 0; m < L; ++m)
            out.noalias() += std::conj(coefficients(n, m)) * (PnX * spec.projectors[m]);
    }
    return out;
}

Superoperator PartialDephasingMap::toSuperoperator() const {
    const Eigen::Index d2 = static_cast<Eigen::Index>(spec.dim) * spec.dim;
    Matrix rep = Matrix::Zero(d2, d2);
    const int L = spec.levelCount();
    for (int n = 0; n < L; ++n)
        for (int m = 0; m < L; ++m)
            rep += coefficients(n, m) *
                   kron(spec.projectors[m].transpose(), spec.projectors[n]);
    return {spec.dim, rep};
}

namespace {

// Builds the level-labeled orthonormal eigenbasis and the basis-indexed
// coefficient matrix. Leaves the cache empty if the projector ranks do not
// add up (apply then falls back to the projector sum).
void attachBasisCache(PartialDephasingMap& map) {
    const int d = map.spec.dim;
    const int L = map.spec.levelCount();
    Matrix basis(d, d);
    std::vector<int> label(d, -1);
    int col = 0;
    for (int n = 0; n < L; ++n) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(map.spec.projectors[n]);
        for (int i = 0; i < d; ++i) {
            if (es.eigenvalues()(i) <= 0.5) continue;
            if (col == d) return;
            basis.col(col) = es.eigenvectors().col(i);
            label[col++] = n;
        }
    }
    if (col != d) return;
    map.basis = std::move(basis);
    map.coeffExpanded = Matrix(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            map.coeffExpanded(i, j) = map.coefficients(label[i], label[j]);
}

}  // namespace

PartialDephasingMap buildPartialDephasing(const SpectralDecomposition& spec,
                                          const WaitingTimeDistribution& dist) {
    const int L = spec.levelCount();
    Matrix G(L, L);
    for (int n = 0; n < L; ++n) {
        G(n, n) = 1.0;
        for (int m = n + 1; m < L; ++m) {
            G(n, m) = gCoefficient(dist, spec.energies[n] - spec.energies[m]);
            G(m, n) = std::conj(G(n, m));
        }
    }
    PartialDephasingMap map{spec, std::move(G), dist, {}, {}};
    attachBasisCache(map);
    return map;
}

PartialDephasingMap buildDephasing(const SpectralDecomposition& spec) {
    PartialDephasingMap map{spec,
                            Matrix::Identity(spec.levelCount(), spec.levelCount()),
                            {DistributionFamily::Delta, 0.0, 0.0},
                            {},
                            {}};
    attachBasisCache(map);
    return map;
}

double fuzzinessScale(const PartialDephasingMap& map) {
    const int L = map.spec.levelCount();
    double s = 0.0;
    for (int n = 0; n < L; ++n)
        for (int m = 0; m < L; ++m)
            if (n != m) s = std::max(s, std::abs(map.coefficients(n, m)));
    return s;
}

SpectralDecomposition withEnergies(const SpectralDecomposition& spec,
                                   const std::vector<double>& energies) {
    if (static_cast<int>(energies.size()) != spec.levelCount())
        throw std::invalid_argument("withEnergies: energy vector length mismatch");
    SpectralDecomposition out = spec;
    out.energies = energies;
    return out;
}

}  // namespace fuzzproc
