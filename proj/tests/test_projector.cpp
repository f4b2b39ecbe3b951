#include "doctest.h"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "tomo/projector.hpp"
#include "tomo/rng.hpp"

using namespace tomo;

namespace {

SystemMatrix square_system(int n, double theta_max, int n_proj, int n_det = 0) {
    const auto geom = make_geometry(n, n, n_det > 0 ? n_det : n,
                                    make_tilt_schedule(theta_max, n_proj));
    return build_system_matrix(geom);
}

Eigen::MatrixXd dense_matrix(const SystemMatrix& A) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.n_rows, A.n_cols);
    for (int i = 0; i < A.n_rows; ++i) {
        const auto cols = A.row_cols(i);
        const auto vals = A.row_vals(i);
        for (std::size_t j = 0; j < cols.size(); ++j) M(i, cols[j]) = vals[j];
    }
    return M;
}

double row_sum(const SystemMatrix& A, int i) {
    double s = 0.0;
    for (double v : A.row_vals(i)) s += v;
    return s;
}

ImageGrid random_image(int w, int h, std::uint64_t seed) {
    ImageGrid img(w, h);
    std::mt19937_64 gen(seed);
    for (double& v : img.values) v = uniform(gen, -1.0, 1.0);
    return img;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("axis-aligned rays sum to the grid side length") {
    // theta endpoints give one horizontal and one vertical projection
    const SystemMatrix A = square_system(4, 90.0, 2);
    REQUIRE(A.n_rows == 8);
    for (int i = 0; i < A.n_rows; ++i)
        CHECK(row_sum(A, i) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("the central diagonal ray sums to the diagonal length") {
    const auto geom = make_geometry(4, 4, 1, make_tilt_schedule(45.0, 1));
    const SystemMatrix A = build_system_matrix(geom);
    REQUIRE(A.n_rows == 1);
    CHECK(row_sum(A, 0) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("row sums match a sampled chord-length oracle") {
    // wider detector than the grid so some rays miss entirely
    const auto geom = make_geometry(8, 8, 12, make_tilt_schedule(70.0, 3));
    const SystemMatrix A = build_system_matrix(geom);

    const double t_lo = -12.0, t_hi = 12.0;
    const int n_samples = 10000;
    const double dt = (t_hi - t_lo) / n_samples;

    for (int p = 0; p < geom.schedule.n_proj; ++p) {
        const double phi = geom.schedule.angles_deg[p] * 3.141592653589793 / 180.0;
        const double s = std::sin(phi), c = std::cos(phi);
        for (int d = 0; d < geom.n_det; ++d) {
            const double off = (d - 0.5 * (geom.n_det - 1)) * geom.det_spacing;
            const double u0 = off * c + 4.0, v0 = off * s + 4.0;
            auto inside = [&](double t) {
                const double u = u0 - t * s, v = v0 + t * c;
                return u > 0.0 && u < 8.0 && v > 0.0 && v < 8.0;
            };
            int first = -1, last = -1;
            for (int k = 0; k < n_samples; ++k) {
                if (inside(t_lo + (k + 0.5) * dt)) {
                    if (first < 0) first = k;
                    last = k;
                }
            }
            const int ray = p * geom.n_det + d;
            if (first < 0) {
                CHECK(row_sum(A, ray) <= 2.0 * dt);
                continue;
            }
            // bisect the entry and exit points between in/out samples
            auto bisect = [&](double t_out, double t_in) {
                for (int k = 0; k < 80; ++k) {
                    const double m = 0.5 * (t_out + t_in);
                    (inside(m) ? t_in : t_out) = m;
                }
                return 0.5 * (t_out + t_in);
            };
            const double entry = bisect(t_lo + (first - 0.5) * dt, t_lo + (first + 0.5) * dt);
            const double exit = bisect(t_lo + (last + 1.5) * dt, t_lo + (last + 0.5) * dt);
            CHECK(std::abs(row_sum(A, ray) - (exit - entry)) <= 1e-6);
        }
    }
}

TEST_CASE("sparse rows are well formed") {
    const SystemMatrix A = square_system(8, 90.0, 3, 12);
    REQUIRE(A.row_start.size() == static_cast<std::size_t>(A.n_rows) + 1);
    CHECK(A.row_start.back() == A.nnz());
    for (int i = 0; i < A.n_rows; ++i) {
        CHECK(A.row_start[i] <= A.row_start[i + 1]);
        std::set<std::uint32_t> seen;
        for (std::size_t j = 0; j < A.row_cols(i).size(); ++j) {
            const std::uint32_t col = A.row_cols(i)[j];
            CHECK(col < static_cast<std::uint32_t>(A.n_cols));
            CHECK(seen.insert(col).second);
            CHECK(A.row_vals(i)[j] > 0.0);
        }
    }
}

TEST_CASE("matrix construction is deterministic") {
    const SystemMatrix a = square_system(8, 60.0, 5);
    const SystemMatrix b = square_system(8, 60.0, 5);
    CHECK(a.row_start == b.row_start);
    CHECK(a.cols == b.cols);
    CHECK(a.vals == b.vals);
}

TEST_CASE("forward projection matches the dense oracle") {
    const SystemMatrix A = square_system(6, 90.0, 4);
    const ImageGrid x = random_image(6, 6, 17);
    const Sinogram b = forward_project(A, x, 4, 6);

    const Eigen::MatrixXd M = dense_matrix(A);
    Eigen::VectorXd xv(36);
    for (int j = 0; j < 36; ++j) xv(j) = x.values[j];
    const Eigen::VectorXd bv = M * xv;
    for (int i = 0; i < A.n_rows; ++i)
        CHECK(b.values[i] == doctest::Approx(bv(i)).epsilon(1e-12));

    const ImageGrid zero(6, 6, 0.0);
    for (double v : forward_project(A, zero, 4, 6).values) CHECK(v == 0.0);
}

TEST_CASE("adjoint identity holds to high precision") {
    const SystemMatrix A = square_system(16, 90.0, 16);
    std::mt19937_64 gen(2024);
    for (int pair = 0; pair < 20; ++pair) {
        ImageGrid x(16, 16);
        for (double& v : x.values) v = uniform(gen, -1.0, 1.0);
        Sinogram y;
        y.n_proj = 16;
        y.n_det = 16;
        y.values.resize(256);
        for (double& v : y.values) v = uniform(gen, -1.0, 1.0);

        const Sinogram Ax = forward_project(A, x, 16, 16);
        const ImageGrid Aty = back_project(A, y, 16, 16);
        const double lhs = dot(Ax.values, y.values);
        const double rhs = dot(x.values, Aty.values);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("back projection of a unit ray extracts that row") {
    const SystemMatrix A = square_system(8, 75.0, 4);
    for (int ray : {0, 7, 19}) {
        Sinogram e;
        e.n_proj = 4;
        e.n_det = 8;
        e.values.assign(32, 0.0);
        e.values[ray] = 1.0;
        const ImageGrid img = back_project(A, e, 8, 8);
        std::vector<double> expect(64, 0.0);
        const auto cols = A.row_cols(ray);
        const auto vals = A.row_vals(ray);
        for (std::size_t j = 0; j < cols.size(); ++j) expect[cols[j]] = vals[j];
        CHECK(img.values == expect);
    }
}

TEST_CASE("forward mass of a delta image equals the pixel's column sum") {
    const SystemMatrix A = square_system(8, 90.0, 6);
    Sinogram ones;
    ones.n_proj = 6;
    ones.n_det = 8;
    ones.values.assign(48, 1.0);
    const ImageGrid colsum = back_project(A, ones, 8, 8);

    for (int p : {0, 27, 63}) {
        ImageGrid delta(8, 8, 0.0);
        delta.values[p] = 1.0;
        const Sinogram b = forward_project(A, delta, 6, 8);
        double mass = 0.0;
        for (double v : b.values) mass += v;
        CHECK(mass == doctest::Approx(colsum.values[p]).epsilon(1e-12));
    }
}

TEST_CASE("projection dimensions are validated") {
    const SystemMatrix A = square_system(6, 90.0, 4);
    const ImageGrid wrong(5, 5, 0.0);
    CHECK_THROWS_AS(forward_project(A, wrong, 4, 6), std::invalid_argument);

    Sinogram bad;
    bad.n_proj = 4;
    bad.n_det = 5;
    bad.values.assign(20, 0.0);
    CHECK_THROWS_AS(back_project(A, bad, 6, 6), std::invalid_argument);
}

TEST_CASE("operator norm of a single row is its euclidean norm") {
    SystemMatrix A;
    A.n_rows = 1;
    A.n_cols = 3;
    A.row_start = {0, 2};
    A.cols = {0, 2};
    A.vals = {3.0, 4.0};
    CHECK(estimate_operator_norm(A, 1, 1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(estimate_operator_norm(A, 25, 9) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("operator norm of an identity-like matrix is one") {
    SystemMatrix A;
    A.n_rows = 4;
    A.n_cols = 4;
    A.row_start = {0, 1, 2, 3, 4};
    A.cols = {0, 1, 2, 3};
    A.vals = {1.0, 1.0, 1.0, 1.0};
    CHECK(estimate_operator_norm(A, 3, 5) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("operator norm approaches the dense largest singular value") {
    const SystemMatrix A = square_system(8, 90.0, 8);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense_matrix(A));
    const double sigma = svd.singularValues()(0);

    const double est = estimate_operator_norm(A, 100, 3);
    CHECK(est <= sigma * (1.0 + 1e-10));
    CHECK(est >= sigma * 0.99);

    // estimates improve monotonically with the iteration budget
    double prev = 0.0;
    for (int iters : {2, 5, 10, 20, 50}) {
        const double cur = estimate_operator_norm(A, iters, 3);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
    }
    CHECK(estimate_operator_norm(A, 40, 3) == estimate_operator_norm(A, 40, 3));
}

TEST_CASE("rays that miss the grid produce empty rows and zero norm") {
    const auto geom = make_geometry(4, 4, 2, make_tilt_schedule(90.0, 2), 100.0);
    const SystemMatrix A = build_system_matrix(geom);
    CHECK(A.nnz() == 0);
    CHECK(estimate_operator_norm(A, 10, 1) == 0.0);
}
