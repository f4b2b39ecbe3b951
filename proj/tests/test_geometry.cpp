#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "tomo/geometry.hpp"
#include "tomo/projector.hpp"

using namespace tomo;

namespace {

Eigen::MatrixXd dense_matrix(const SystemMatrix& A) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.n_rows, A.n_cols);
    for (int i = 0; i < A.n_rows; ++i) {
        const auto cols = A.row_cols(i);
        const auto vals = A.row_vals(i);
        for (std::size_t j = 0; j < cols.size(); ++j) M(i, cols[j]) = vals[j];
    }
    return M;
}

int numerical_rank(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * s(0) * std::max(M.rows(), M.cols());
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tol) ++r;
    return r;
}

}  // namespace

TEST_CASE("tilt schedules are endpoint-exclusive on the upper end") {
    const TiltSchedule two = make_tilt_schedule(90.0, 2);
    REQUIRE(two.angles_deg.size() == 2);
    CHECK(two.angles_deg[0] == doctest::Approx(-90.0).epsilon(1e-15));
    CHECK(two.angles_deg[1] == doctest::Approx(0.0).epsilon(1e-15));

    const TiltSchedule one = make_tilt_schedule(90.0, 1);
    REQUIRE(one.angles_deg.size() == 1);
    CHECK(one.angles_deg[0] == doctest::Approx(-90.0));

    const TiltSchedule four = make_tilt_schedule(75.0, 4);
    REQUIRE(four.angles_deg.size() == 4);
    CHECK(four.angles_deg[0] == doctest::Approx(-75.0));
    CHECK(four.angles_deg[1] == doctest::Approx(-37.5));
    CHECK(four.angles_deg[2] == doctest::Approx(0.0));
    CHECK(four.angles_deg[3] == doctest::Approx(37.5));
}

TEST_CASE("tilt schedule spacing is uniform and spans at most the range") {
    for (double theta : {30.0, 62.5, 90.0}) {
        for (int np : {1, 3, 8, 41}) {
            const TiltSchedule s = make_tilt_schedule(theta, np);
            CHECK(s.angles_deg.back() - s.angles_deg.front() <= 2.0 * theta + 1e-12);
            const double step = 2.0 * theta / np;
            for (int i = 1; i < np; ++i) {
                const double d = s.angles_deg[i] - s.angles_deg[i - 1];
                CHECK(std::abs(d - step) <= 1e-12 * step);
            }
        }
    }
}

TEST_CASE("tilt schedule rejects invalid parameters") {
    CHECK_THROWS_AS(make_tilt_schedule(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_tilt_schedule(-10.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_tilt_schedule(90.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_tilt_schedule(45.0, 0), std::invalid_argument);
}

TEST_CASE("sufficient projection number uses the counting bound") {
    CHECK(sufficient_projection_number(512, 512, 1024) == 256);
    CHECK(sufficient_projection_number(256, 256, 256) == 256);
    CHECK(sufficient_projection_number(2, 2, 2) == 2);
    CHECK(sufficient_projection_number(3, 3, 2) == 5);  // ceil(9/2)
    CHECK(sufficient_projection_number(1, 1, 1) == 1);
    CHECK_THROWS_AS(sufficient_projection_number(0, 4, 4), std::invalid_argument);
    CHECK_THROWS_AS(sufficient_projection_number(4, 4, 0), std::invalid_argument);
}

TEST_CASE("sufficient projection number is non-increasing in detector count") {
    int prev = sufficient_projection_number(32, 32, 1);
    for (int nd = 2; nd <= 64; ++nd) {
        const int cur = sufficient_projection_number(32, 32, nd);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("relative sampling is exactly 1 at the sufficient number") {
    const int ns = sufficient_projection_number(32, 32, 32);
    CHECK(static_cast<double>(ns) / sufficient_projection_number(32, 32, 32) == 1.0);
}

TEST_CASE("tiny grids reach full rank at the sufficient number with oblique angles") {
    // Full-range schedules contain axis-parallel duplicates at these sizes;
    // a narrower range keeps every ray direction informative.
    for (int n : {2, 4}) {
        const int ns = sufficient_projection_number(n, n, n);
        REQUIRE(ns == n);
        const auto geom = make_geometry(n, n, n, make_tilt_schedule(55.0, ns));
        const SystemMatrix A = build_system_matrix(geom);
        REQUIRE(A.n_rows == n * n);
        CHECK(numerical_rank(dense_matrix(A)) == n * n);
    }
}

TEST_CASE("image grid validation catches shape and value errors") {
    ImageGrid g(3, 2, 0.5);
    g.validate();
    g.validate(true);

    g.values[1] = -0.25;
    g.validate();
    CHECK_THROWS_AS(g.validate(true), std::invalid_argument);

    g.values[1] = std::nan("");
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);

    g.values[1] = 0.0;
    g.values.pop_back();
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);

    CHECK_THROWS_AS(ImageGrid(0, 3), std::invalid_argument);
}

TEST_CASE("geometry construction validates inputs") {
    const TiltSchedule s = make_tilt_schedule(90.0, 4);
    CHECK_THROWS_AS(make_geometry(0, 4, 4, s), std::invalid_argument);
    CHECK_THROWS_AS(make_geometry(4, 4, 0, s), std::invalid_argument);
    CHECK_THROWS_AS(make_geometry(4, 4, 4, s, 0.0), std::invalid_argument);
    TiltSchedule broken;
    CHECK_THROWS_AS(make_geometry(4, 4, 4, broken), std::invalid_argument);
}
