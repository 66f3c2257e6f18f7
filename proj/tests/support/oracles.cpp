#include "oracles.hpp"

#include <cmath>

namespace oracle {

RMat form_I(int n)
{
    RMat m = RMat::Identity(2 * n, 2 * n);
    m(2 * n - 1, 2 * n - 1) = -1.0;
    return m;
}

RMat form_J(int n)
{
    RMat m = RMat::Identity(n, n);
    m(n - 1, n - 1) = -1.0;
    return m;
}

RMat rho(int n)
{
    RMat m = RMat::Identity(2 * n, 2 * n);
    m.bottomRightCorner(n, n) *= -1.0;
    return m;
}

RMat semisimple_a(int n, int i)
{
    RMat a = RMat::Zero(2 * n, 2 * n);
    a(i, n + i) = (i == n - 1) ? -1.0 : 1.0;
    a(n + i, i) = -1.0;
    return a;
}

RMat channel_a(int n, int p, int i)
{
    if (i < p) {
        return semisimple_a(n, i);
    }
    RMat a = RMat::Zero(2 * n, 2 * n);
    a(i, n + n - 2) = 1.0;
    a(i, n + n - 1) = -1.0;
    a(n + n - 2, i) = -1.0;
    a(n + n - 1, i) = -1.0;
    return a;
}

std::vector<RMat> basis(int n, int p)
{
    std::vector<RMat> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(p >= n ? semisimple_a(n, i) : channel_a(n, p, i));
    }
    return out;
}

CMat taylor_expm(const CMat& a)
{
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (std::ldexp(1.0, -squarings) * norm > 0.25) {
        ++squarings;
    }
    const CMat s = a * std::ldexp(1.0, -squarings);
    CMat term = CMat::Identity(a.rows(), a.cols());
    CMat sum = term;
    for (int k = 1; k < 40; ++k) {
        term = term * s / static_cast<double>(k);
        sum += term;
    }
    for (int k = 0; k < squarings; ++k) {
        sum = sum * sum;
    }
    return sum;
}

CMat vacuum_frame(const std::vector<RMat>& a, const RVec& x, Complex lambda)
{
    const auto dim = a[0].rows();
    CMat gen = CMat::Zero(dim, dim);
    for (std::size_t i = 0; i < a.size(); ++i) {
        gen += (lambda * x(static_cast<Eigen::Index>(i))) * a[i].cast<Complex>();
    }
    return taylor_expm(gen);
}

CMat simple_factor(Complex alpha, const CVec& v, Complex lambda)
{
    const int n = static_cast<int>(v.size()) / 2;
    const CMat I = form_I(n).cast<Complex>();
    const CMat R = rho(n).cast<Complex>();
    const CVec rv = R * v;
    const Complex denom = (v.transpose() * I * rv)(0);
    const CMat piL = v * (I * rv).transpose() / denom;
    const CMat piR = R * piL * R;
    const CMat id = CMat::Identity(2 * n, 2 * n);
    return ((lambda - alpha) / (lambda + alpha)) * piL + (id - piL - piR) + ((lambda + alpha) / (lambda - alpha)) * piR;
}

CMat dressed_frame(const std::vector<RMat>& a, const std::vector<Element>& chain, const RVec& x, Complex lambda)
{
    if (chain.empty()) {
        return vacuum_frame(a, x, lambda);
    }
    const std::vector<Element> head(chain.begin(), chain.end() - 1);
    const Element& e = chain.back();
    const CMat phi = dressed_frame(a, head, x, lambda);
    const CMat phi_alpha = dressed_frame(a, head, x, e.alpha);
    const CVec moved = phi_alpha.partialPivLu().solve(e.v);
    return simple_factor(e.alpha, e.v, lambda) * phi * simple_factor(-e.alpha, moved, lambda);
}

CVec real_null(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    CVec v(2 * n);
    double s = 0.0;
    for (int k = 0; k < 2 * n - 1; ++k) {
        v(k) = normal(rng);
        s += std::norm(v(k));
    }
    v(2 * n - 1) = std::sqrt(s);
    return v;
}

CVec split_null(int n, std::mt19937_64& rng)
{
    // head w real, tail i*g with (w,w) + (ig)^T J (ig) = |w|^2 - |g'|^2 + g_n^2 = 0
    std::normal_distribution<double> normal;
    CVec v(2 * n);
    for (int k = 0; k < n; ++k) {
        v(k) = normal(rng);
    }
    double head = 0.0;
    for (int k = 0; k < n; ++k) {
        head += std::norm(v(k));
    }
    std::vector<double> g(n);
    double gs = 0.0;
    for (int k = 0; k < n - 1; ++k) {
        g[k] = normal(rng);
        gs += g[k] * g[k];
    }
    // need sum_{k<n} g_k^2 - g_n^2 = head, scale the spatial part up if needed
    const double target = head + 1.0;
    const double scale = std::sqrt(target / gs);
    gs = 0.0;
    for (int k = 0; k < n - 1; ++k) {
        g[k] *= scale;
        gs += g[k] * g[k];
    }
    g[n - 1] = std::sqrt(gs - head);
    for (int k = 0; k < n; ++k) {
        v(n + k) = Complex(0.0, g[k]);
    }
    return v;
}

double diagonal_metric_curvature(const std::function<RVec(const RVec&)>& h, const RVec& x)
{
    // general Levi-Civita formulas on g = diag(h^2), no use of the diagonal structure
    const int n = static_cast<int>(x.size());
    const auto metric = [&](const RVec& p) {
        const RVec hp = h(p);
        return RMat(hp.cwiseProduct(hp).asDiagonal());
    };
    const auto dmetric = [&](const RVec& p, int axis) {
        return derivative<RMat>(
            [&](double t) {
                RVec q = p;
                q(axis) = t;
                return metric(q);
            },
            p(axis));
    };
    // gamma[a](b, c) = Gamma^a_bc
    const auto christoffel = [&](const RVec& p) {
        const RMat g = metric(p);
        const RMat ginv = g.inverse();
        std::vector<RMat> dg;
        for (int c = 0; c < n; ++c) {
            dg.push_back(dmetric(p, c));
        }
        std::vector<RMat> gamma(n, RMat::Zero(n, n));
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                for (int c = 0; c < n; ++c) {
                    double s = 0.0;
                    for (int e = 0; e < n; ++e) {
                        s += 0.5 * ginv(a, e) * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
                    }
                    gamma[a](b, c) = s;
                }
            }
        }
        return gamma;
    };
    const std::vector<RMat> G = christoffel(x);
    std::vector<std::vector<RMat>> dG;
    for (int c = 0; c < n; ++c) {
        std::vector<RMat> per(n);
        for (int a = 0; a < n; ++a) {
            per[a] = derivative<RMat>(
                [&](double t) {
                    RVec q = x;
                    q(c) = t;
                    return christoffel(q)[a];
                },
                x(c));
        }
        dG.push_back(per);
    }
    const RMat g = metric(x);
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                for (int d = c + 1; d < n; ++d) {
                    double r = dG[c][a](d, b) - dG[d][a](c, b);
                    for (int e = 0; e < n; ++e) {
                        r += G[a](c, e) * G[e](d, b) - G[a](d, e) * G[e](c, b);
                    }
                    worst = std::max(worst, std::abs(g(a, a) * r));
                }
            }
        }
    }
    return worst;
}

double uk_defect(const std::vector<RMat>& a, const std::function<RMat(const RVec&)>& xi, const RVec& x,
                 double sign)
{
    const int n = static_cast<int>(a.size());
    const auto comm = [](const RMat& p, const RMat& q) -> RMat { return p * q - q * p; };
    std::vector<RMat> dxi;
    for (int j = 0; j < n; ++j) {
        dxi.push_back(derivative<RMat>(
            [&](double t) {
                RVec q = x;
                q(j) = t;
                return xi(q);
            },
            x(j)));
    }
    const RMat X = xi(x);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const RMat r = comm(a[i], dxi[j]) - comm(a[j], dxi[i]) + sign * comm(comm(a[i], X), comm(a[j], X));
            worst = std::max(worst, r.cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

} // namespace oracle
