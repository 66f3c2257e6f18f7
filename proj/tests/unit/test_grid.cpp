#include "cflat/errors.hpp"
#include "cflat/grid.hpp"
#include "cflat/parallel.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace cflat;

TEST_CASE("grid geometry indexing is row-major with the last axis fastest")
{
    const GridGeometry g({-1.0, -1.0, 0.0}, {1.0, 1.0, 2.0}, {5, 6, 7});
    CHECK(g.size() == 210);
    CHECK(g.stride(2) == 1);
    CHECK(g.stride(1) == 7);
    CHECK(g.stride(0) == 42);
    CHECK(g.spacing(0) == doctest::Approx(0.5));
    CHECK(g.spacing(2) == doctest::Approx(1.0 / 3.0));
    for (std::size_t k = 0; k < g.size(); k += 13) {
        CHECK(g.flat_index(g.multi_index(k)) == k);
        CHECK(g.locate(g.point(k)) == k);
    }
    CHECK(g.point(1)(2) == doctest::Approx(1.0 / 3.0));
    CHECK(g.interior_points().size() == 3u * 4u * 5u);
    CHECK(g.point(g.nearest_origin()).norm() <= 0.2 + 1e-12);
    CHECK_THROWS_AS(GridGeometry({0.0}, {1.0}, {4}), ArgumentError);
    CHECK_THROWS_AS(GridGeometry({0.0}, {0.0}, {5}), ArgumentError);
}

TEST_CASE("partial derivatives are exact on quadratics, including faces")
{
    const GridGeometry g = GridGeometry::cube(2, -1.0, 1.0, 9);
    std::vector<double> f(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const RVec x = g.point(k);
        f[k] = 3.0 * x(0) * x(0) - 2.0 * x(0) * x(1) + x(1);
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        const RVec x = g.point(k);
        CHECK(partial(f, g, k, 0) == doctest::Approx(6.0 * x(0) - 2.0 * x(1)).epsilon(1e-12));
        CHECK(partial(f, g, k, 1) == doctest::Approx(-2.0 * x(0) + 1.0).epsilon(1e-12));
    }
}

TEST_CASE("central differences converge at second order")
{
    double prev = 0.0;
    for (int steps : {11, 21, 41}) {
        const GridGeometry g = GridGeometry::cube(1, -1.0, 1.0, steps);
        std::vector<double> f(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            f[k] = std::sin(2.0 * g.point(k)(0));
        }
        double err = 0.0;
        for (std::size_t k : g.interior_points()) {
            err = std::max(err, std::abs(partial(f, g, k, 0) - 2.0 * std::cos(2.0 * g.point(k)(0))));
        }
        if (prev > 0.0) {
            CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
        }
        prev = err;
    }
}

TEST_CASE("point mask bookkeeping")
{
    const GridGeometry g = GridGeometry::cube(2, 0.0, 1.0, 6);
    PointMask m(g.size());
    CHECK(m.count() == 0);
    const std::size_t centre = g.flat_index({2, 2});
    m.mark(centre, "degenerate");
    m.mark(centre, "second reason ignored");
    CHECK(m.reason(centre) == "degenerate");
    CHECK(m.stencil_masked(g.flat_index({3, 2}), g));
    CHECK(m.stencil_masked(g.flat_index({2, 1}), g));
    CHECK_FALSE(m.stencil_masked(g.flat_index({3, 3}), g));
    PointMask other(g.size());
    other.mark(0, "corner");
    m.merge(other);
    CHECK(m.count() == 2);
}

TEST_CASE("parallel loop matches serial loop and rethrows the lowest failing index")
{
    std::vector<double> a(1000);
    std::vector<double> b(1000);
    for_each_index(a.size(), Exec::serial, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
    for_each_index(b.size(), Exec::parallel, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
    CHECK(a == b);
    try {
        for_each_index(500, Exec::parallel, [](std::size_t i) {
            if (i == 123 || i == 400) {
                throw std::runtime_error(std::to_string(i));
            }
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& err) {
        CHECK(std::string(err.what()) == "123");
    }
}
