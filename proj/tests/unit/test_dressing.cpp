#include "cflat/dressing.hpp"
#include "cflat/errors.hpp"
#include "cflat/immersion.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace cflat;

namespace {

struct Case {
    Complex alpha;
    CVec v;
};

Case real_case(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return {0.5, oracle::real_null(3, rng)};
}

Case split_case(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return {Complex(0.0, 0.7), oracle::split_null(3, rng)};
}

RVec random_point(std::mt19937_64& rng, double r = 0.8)
{
    std::uniform_real_distribution<double> u(-r, r);
    return RVec::NullaryExpr(3, [&](Eigen::Index) { return u(rng); });
}

/// Flat lift Phi_1 (0; g_2^{-1} c) from the oracle frame.
RVec oracle_lift(const std::vector<RMat>& a, const std::vector<oracle::Element>& chain, const RVec& x, const RVec& c)
{
    const RMat phi0 = oracle::dressed_frame(a, chain, x, 0.0).real();
    const RMat phi1 = oracle::dressed_frame(a, chain, x, 1.0).real();
    const RVec q = phi0.bottomRightCorner(3, 3).partialPivLu().solve(c);
    RVec y = RVec::Zero(6);
    y.tail(3) = q;
    return phi1 * y;
}

} // namespace

TEST_CASE("transported lines are normalised")
{
    const QuadraticForm form(3);
    const RMat J = oracle::form_J(3);
    for (const Case& c : {real_case(1), split_case(2)}) {
        const SimpleElement e = SimpleElement::make(c.alpha, c.v, form);
        const LineFlavor flavor = flavor_for(e.kind());
        const TransportedLine tl = normalize_transported(Complex(0.3, -1.1) * c.v, flavor, form);
        CHECK(tl.W.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(std::abs(Complex((tl.Z.transpose() * J * tl.Z)(0)) + 2.0) < 1e-12);
        CHECK(collinearity_residual(tl.stacked(), c.v) < 1e-12);
        if (flavor == LineFlavor::real) {
            CHECK(max_imag(tl.Z) < 1e-14);
        } else {
            CHECK(tl.Z.real().cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    CVec no_w = CVec::Zero(6);
    no_w(4) = 1.0;
    no_w(5) = 1.0;
    CHECK_THROWS_AS(normalize_transported(no_w, LineFlavor::real, form), DegenerateLine);
    CHECK_THROWS_AS(normalize_transported(CVec::Zero(6), LineFlavor::real, form), DegenerateLine);
}

TEST_CASE("collinearity residual")
{
    CVec a(3);
    a << 1.0, Complex(0.0, 2.0), -1.0;
    CHECK(collinearity_residual(a, Complex(0.5, 3.0) * a) < 1e-15);
    CHECK(collinearity_residual(CVec::Unit(3, 2), CVec::Unit(3, 0)) == doctest::Approx(1.0));
}

TEST_CASE("closed-form line transport matches the frame inverse and the ODE")
{
    const CartanBasis basis = CartanBasis::semisimple(3);
    const std::vector<RMat> a = oracle::basis(3, 3);
    std::mt19937_64 rng(3);
    for (const Case& c : {real_case(4), split_case(5)}) {
        const SimpleElement e = SimpleElement::make(c.alpha, c.v, basis.form());
        const ExtendedFrame vac = ExtendedFrame::vacuum(basis);
        for (int trial = 0; trial < 5; ++trial) {
            const RVec x = random_point(rng);
            const CVec ref = oracle::vacuum_frame(a, x, c.alpha).partialPivLu().solve(c.v);
            CHECK(collinearity_residual(transport_line(vac, e, x).stacked(), ref) < 1e-12);
            CHECK(collinearity_residual(transport_line_ode(vac, e, x), ref) < 1e-8);
        }
        // a line transported through an already dressed frame
        const ExtendedFrame one = vac.dressed(e);
        const Case second = real_case(6);
        const SimpleElement e2 = SimpleElement::make(0.8, second.v, basis.form());
        const RVec x = random_point(rng);
        const CVec ref =
            oracle::dressed_frame(a, {{c.alpha, c.v}}, x, 0.8).partialPivLu().solve(second.v);
        CHECK(collinearity_residual(transport_line(one, e2, x).stacked(), ref) < 1e-10);
        CHECK(collinearity_residual(transport_line_ode(one, e2, x), ref) < 1e-8);
        CHECK(collinearity_residual(transport_line(one.dressed(e2), 1, x).stacked(), ref) < 1e-10);
    }
}

TEST_CASE("closed-form potential agrees with numerical extraction")
{
    const CartanBasis basis = CartanBasis::semisimple(3);
    const Case c = real_case(2);
    const ExtendedFrame frame = ExtendedFrame::vacuum(basis).dressed(SimpleElement::make(c.alpha, c.v, basis.form()));
    const GridGeometry g = GridGeometry::cube(3, -1.0, 1.0, 21);
    const SolutionGrid closed = dressed_solution(frame, g);
    const SolutionGrid numeric = extracted_solution(frame, g);
    const double h = g.max_spacing();
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.interior(k) || closed.mask.masked(k) || numeric.mask.masked(k)) {
            continue;
        }
        worst = std::max(worst, max_abs(RMat(closed.values[k] - numeric.values[k])));
    }
    CHECK(worst < 25.0 * h * h);
    CHECK(closed.mask.count() == 0);
}

TEST_CASE("extract_potential inverts the commutator map")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal;
    for (const CartanBasis& basis : {CartanBasis::semisimple(3), CartanBasis::channel(3, 1)}) {
        RMat xi(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                xi(i, j) = normal(rng);
            }
        }
        const RMat big = PPotential::projected(xi, basis).matrix();
        std::vector<CMat> theta0;
        for (int i = 0; i < 3; ++i) {
            theta0.push_back(commutator(basis[i], big).cast<Complex>());
        }
        CHECK(max_abs(RMat(extract_potential(basis, theta0) - big)) < 1e-12);
        CHECK_THROWS_AS(extract_potential(basis, {theta0[0]}), ArgumentError);
    }
}

TEST_CASE("explicit dressed immersion matches the lift of the dressed oracle frame")
{
    const CartanBasis basis = CartanBasis::semisimple(3);
    const QuadraticForm& form = basis.form();
    const std::vector<RMat> a = oracle::basis(3, 3);
    const RVec c = default_null_vector(3);
    std::mt19937_64 rng(9);
    for (const Case& cs : {real_case(10), split_case(11)}) {
        const SimpleElement e = SimpleElement::make(cs.alpha, cs.v, form);
        const ExtendedFrame vac = ExtendedFrame::vacuum(basis);
        // the oracle frame differs from the explicit formula by the constant left factor p_v
        const RMat left0 = oracle::simple_factor(cs.alpha, cs.v, 0.0).real();
        const RMat left1 = oracle::simple_factor(cs.alpha, cs.v, 1.0).real();
        const RVec shifted = left0.bottomRightCorner(3, 3).partialPivLu().solve(c);
        for (int trial = 0; trial < 5; ++trial) {
            const RVec x = random_point(rng);
            const LiftPoint lift = flat_lift(vac, x, shifted);
            const DressedImmersion d = dressed_immersion(lift.phi1, lift.q, cs.alpha, transport_line(vac, e, x), form);
            const RVec ref = oracle_lift(a, {{cs.alpha, cs.v}}, x, c);
            CHECK(max_abs(RVec(left1 * d.F - ref)) < 1e-10 * (1.0 + max_abs(ref)));
            CHECK(d.imag < 1e-10);
            CHECK(std::abs(inner(d.F, d.F, form)) < 1e-10 * (1.0 + d.F.squaredNorm()));
            const RMat fr = d.frame();
            CHECK(group_residual(fr, form) < 1e-9);
        }
        const LiftPoint lift = flat_lift(vac, RVec::Zero(3), c);
        CHECK_THROWS_AS(dressed_immersion(lift.phi1, lift.q, 1.0, transport_line(vac, e, RVec::Zero(3)), form),
                        ArgumentError);
        CHECK_THROWS_AS(dressed_immersion(lift.phi1, lift.q, -1.0, transport_line(vac, e, RVec::Zero(3)), form),
                        ArgumentError);
    }
}

TEST_CASE("Ribaucour envelope data for both flavors")
{
    const CartanBasis basis = CartanBasis::semisimple(3);
    const QuadraticForm& form = basis.form();
    const RVec c = default_null_vector(3);
    std::mt19937_64 rng(12);
    for (const Case& cs : {real_case(13), split_case(14)}) {
        const SimpleElement e = SimpleElement::make(cs.alpha, cs.v, form);
        const ExtendedFrame vac = ExtendedFrame::vacuum(basis);
        for (int trial = 0; trial < 5; ++trial) {
            const RVec x = random_point(rng);
            const LiftPoint lift = flat_lift(vac, x, c);
            const TransportedLine tl = transport_line(vac, e, x);
            const DressedImmersion target = dressed_immersion(lift.phi1, lift.q, cs.alpha, tl, form);
            const RibaucourData data = ribaucour_data(lift.phi1, lift.q, target, tl, form);
            const RibaucourChecks r = check_ribaucour(lift.phi1, lift.q, lift.F, target, data, tl, cs.alpha, form);
            CHECK(r.envelope < 1e-8);
            CHECK(r.radius < 1e-8);
            CHECK(r.collinearity < 1e-8);
            CHECK(r.cone < 1e-8);
            CHECK(r.kind_matches);
            CHECK(r.imag < 1e-10);
            const CongruenceKind expected =
                e.kind() == AlphaKind::real ? CongruenceKind::hyperbola : CongruenceKind::sphere;
            CHECK(data.kind == expected);
            CHECK((data.kind == CongruenceKind::hyperbola ? data.xi_pairing < 0.0 : data.xi_pairing > 0.0));
            // the enveloped point lies on both congruence members
            CHECK(max_abs(RVec((lift.F + data.xi) - (target.F + data.xi_tilde))) < 1e-8);
        }
    }
    CHECK(std::string(to_string(CongruenceKind::sphere)) == "sphere");
}

TEST_CASE("permutability of two simple elements")
{
    const QuadraticForm form(3);
    const Case ca = real_case(15);
    const Case cb = split_case(16);
    const SimpleElement a = SimpleElement::make(ca.alpha, ca.v, form);
    const SimpleElement b = SimpleElement::make(cb.alpha, cb.v, form);
    const std::vector<Complex> samples = permutability_samples(a, b);
    CHECK(samples.size() == 20);
    for (Complex l : samples) {
        CHECK(std::abs(l - a.alpha()) > 1e-3);
        CHECK(std::abs(l + a.alpha()) > 1e-3);
        CHECK(std::abs(l - b.alpha()) > 1e-3);
        CHECK(std::abs(l + b.alpha()) > 1e-3);
    }
    CHECK(permutability_residual(a, b, samples, form) < 1e-9);

    // oracle form of the identity
    const SimpleElement a2 = moved_element(a, b, form);
    const SimpleElement b2 = moved_element(b, a, form);
    CHECK(a2.alpha() == a.alpha());
    const CVec moved = oracle::simple_factor(cb.alpha, cb.v, ca.alpha) * ca.v;
    CHECK(collinearity_residual(a2.line().vector(), moved) < 1e-12);
    for (Complex l : samples) {
        const CMat lhs = oracle::simple_factor(a2.alpha(), a2.line().vector(), l) * oracle::simple_factor(cb.alpha, cb.v, l);
        const CMat rhs = oracle::simple_factor(b2.alpha(), b2.line().vector(), l) * oracle::simple_factor(ca.alpha, ca.v, l);
        CHECK(max_abs(CMat(lhs - rhs)) < 1e-9);
    }

    // a wrong pairing is detected
    const SimpleElement wrong = SimpleElement::make(ca.alpha, real_case(17).v, form);
    double off = 0.0;
    for (Complex l : samples) {
        off = std::max(off, max_abs(CMat(wrong.evaluate(l) * b.evaluate(l) - b2.evaluate(l) * a.evaluate(l))));
    }
    CHECK(off > 1e-3);
}

TEST_CASE("Bianchi chains give the same frame in both orders")
{
    const CartanBasis basis = CartanBasis::semisimple(3);
    const QuadraticForm& form = basis.form();
    const SimpleElement a = SimpleElement::make(real_case(18).alpha, real_case(18).v, form);
    const SimpleElement b = SimpleElement::make(0.8, real_case(19).v, form);
    const auto [first, second] = bianchi_chains(a, b, form);
    REQUIRE(first.size() == 2);
    REQUIRE(second.size() == 2);
    ExtendedFrame one = ExtendedFrame::vacuum(basis);
    ExtendedFrame two = ExtendedFrame::vacuum(basis);
    for (const SimpleElement& s : first) {
        one = one.dressed(s);
    }
    for (const SimpleElement& s : second) {
        two = two.dressed(s);
    }
    std::mt19937_64 rng(20);
    const RVec c = default_null_vector(3);
    for (int trial = 0; trial < 5; ++trial) {
        const RVec x = random_point(rng);
        CHECK(max_abs(CMat(one.evaluate(x, 0.3) - two.evaluate(x, 0.3))) < 1e-8);
        CHECK(max_abs(RVec(flat_lift(one, x, c).F - flat_lift(two, x, c).F)) < 1e-8);
    }
}
