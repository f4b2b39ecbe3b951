#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tomo/geometry.hpp"
#include "tomo/metrics.hpp"
#include "tomo/noise.hpp"
#include "tomo/phantom.hpp"
#include "tomo/projector.hpp"
#include "tomo/solver_l1.hpp"
#include "tomo/solver_tv.hpp"

namespace py = pybind11;

namespace {

using Arr = py::array_t<double, py::array::c_style | py::array::forcecast>;

tomo::ImageGrid image_from(const Arr& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2D array");
    tomo::ImageGrid img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    const double* p = a.data();
    std::copy(p, p + img.values.size(), img.values.begin());
    return img;
}

py::array_t<double> array_from(const tomo::ImageGrid& img) {
    py::array_t<double> a({img.height, img.width});
    std::copy(img.values.begin(), img.values.end(), a.mutable_data());
    return a;
}

tomo::Sinogram sinogram_from(const Arr& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2D array");
    tomo::Sinogram b;
    b.n_proj = static_cast<int>(a.shape(0));
    b.n_det = static_cast<int>(a.shape(1));
    const double* p = a.data();
    b.values.assign(p, p + a.size());
    return b;
}

py::array_t<double> array_from(const tomo::Sinogram& b) {
    py::array_t<double> a({b.n_proj, b.n_det});
    std::copy(b.values.begin(), b.values.end(), a.mutable_data());
    return a;
}

py::dict result_dict(const tomo::ReconResult& r) {
    py::dict d;
    d["image"] = array_from(r.image);
    d["iterations"] = r.iterations;
    d["residual"] = r.residual_norm;
    d["objective"] = r.objective;
    d["converged"] = r.converged;
    return d;
}

// Geometry plus its system matrix: the forward/adjoint pair and the bits of
// shape information the solvers need.
class Projector {
public:
    Projector(int width, int height, int n_det, double theta_max, int n_proj)
        : geom_(tomo::make_geometry(width, height, n_det,
                                    tomo::make_tilt_schedule(theta_max, n_proj))),
          A_(tomo::build_system_matrix(geom_)) {}

    const tomo::ProjectionGeometry& geom() const { return geom_; }
    const tomo::SystemMatrix& matrix() const { return A_; }

private:
    tomo::ProjectionGeometry geom_;
    tomo::SystemMatrix A_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Parallel-beam tomography: projector, phantoms, l1/TV solvers";

    py::class_<Projector>(m, "Projector")
        .def(py::init<int, int, int, double, int>(), py::arg("width"),
             py::arg("height"), py::arg("n_det"), py::arg("theta_max"),
             py::arg("n_proj"))
        .def_property_readonly(
            "shape",
            [](const Projector& p) {
                return py::make_tuple(p.matrix().n_rows, p.matrix().n_cols);
            })
        .def_property_readonly(
            "nnz", [](const Projector& p) { return p.matrix().nnz(); })
        .def_property_readonly(
            "angles",
            [](const Projector& p) { return p.geom().schedule.angles_deg; })
        .def("forward",
             [](const Projector& p, const Arr& image) {
                 return array_from(tomo::forward_project(
                     p.matrix(), image_from(image), p.geom().schedule.n_proj,
                     p.geom().n_det));
             },
             py::arg("image"), "Line integrals as a (n_proj, n_det) array")
        .def("back",
             [](const Projector& p, const Arr& sino) {
                 return array_from(tomo::back_project(p.matrix(),
                                                      sinogram_from(sino),
                                                      p.geom().grid_width,
                                                      p.geom().grid_height));
             },
             py::arg("sinogram"), "Adjoint of forward()")
        .def("operator_norm",
             [](const Projector& p, int iterations, std::uint64_t seed) {
                 return tomo::estimate_operator_norm(p.matrix(), iterations, seed);
             },
             py::arg("iterations") = 50, py::arg("seed") = 0);

    m.def("tilt_schedule",
          [](double theta_max, int n_proj) {
              return tomo::make_tilt_schedule(theta_max, n_proj).angles_deg;
          },
          py::arg("theta_max"), py::arg("n_proj"),
          "Evenly spaced angles over [-theta_max, theta_max), degrees");

    m.def("sufficient_projection_number", &tomo::sufficient_projection_number,
          py::arg("width"), py::arg("height"), py::arg("n_det"));

    m.def("pixel_sparse_phantom",
          [](int width, int height, double k, std::uint64_t seed) {
              tomo::PhantomSpec spec;
              spec.kind = tomo::PhantomKind::PixelSparse;
              spec.width = width;
              spec.height = height;
              spec.k_target = k;
              spec.seed = seed;
              return array_from(tomo::generate_pixel_sparse(spec));
          },
          py::arg("width"), py::arg("height"), py::arg("k"), py::arg("seed") = 0);

    m.def("ptc_like_phantom",
          [](int width, int height, std::uint64_t seed, double carbon,
             double particle) {
              tomo::PhantomSpec spec;
              spec.kind = tomo::PhantomKind::PtcLike;
              spec.width = width;
              spec.height = height;
              spec.seed = seed;
              spec.carbon_level = carbon;
              spec.particle_level = particle;
              return array_from(tomo::generate_ptc_like(spec));
          },
          py::arg("width"), py::arg("height"), py::arg("seed") = 0,
          py::arg("carbon") = 0.03, py::arg("particle") = 0.75);

    m.def("rmse",
          [](const Arr& a, const Arr& b) {
              return tomo::rmse(image_from(a), image_from(b));
          },
          py::arg("x"), py::arg("x_ref"));

    m.def("gradient_magnitude",
          [](const Arr& a) {
              return array_from(tomo::gradient_magnitude(image_from(a)));
          },
          py::arg("image"));

    m.def("pixel_sparsity",
          [](const Arr& a) { return tomo::pixel_sparsity(image_from(a)); },
          py::arg("image"));

    m.def("tv_norm",
          [](const Arr& a, double delta) {
              return tomo::tv_norm(image_from(a), delta);
          },
          py::arg("image"), py::arg("delta") = 0.0);

    m.def("tv_gradient",
          [](const Arr& a, double delta) {
              const tomo::ImageGrid img = image_from(a);
              const std::vector<double> g = tomo::tv_gradient(img, delta);
              tomo::ImageGrid out(img.width, img.height);
              out.values = g;
              return array_from(out);
          },
          py::arg("image"), py::arg("delta") = 1e-8);

    m.def("apply_poisson_dose",
          [](const Arr& sino, double total_counts, std::uint64_t seed) {
              return array_from(tomo::apply_poisson_dose(
                  sinogram_from(sino), tomo::DoseSpec{total_counts, seed}));
          },
          py::arg("sinogram"), py::arg("total_counts"), py::arg("seed") = 0);

    m.def("measure_snr",
          [](const Arr& clean, const Arr& noisy) {
              return tomo::measure_snr(sinogram_from(clean), sinogram_from(noisy));
          },
          py::arg("clean"), py::arg("noisy"));

    m.def("solve_l1",
          [](const Projector& p, const Arr& sino, double epsilon, bool nonneg,
             int max_iters, double tol_primal, double tol_dual,
             std::uint64_t seed) {
              tomo::L1Options opts;
              opts.epsilon = epsilon;
              opts.nonneg = nonneg;
              opts.max_iters = max_iters;
              opts.tol_primal = tol_primal;
              opts.tol_dual = tol_dual;
              opts.seed = seed;
              return result_dict(tomo::solve_l1(p.matrix(), sinogram_from(sino),
                                                p.geom().grid_width,
                                                p.geom().grid_height, opts));
          },
          py::arg("projector"), py::arg("sinogram"), py::arg("epsilon") = 0.0,
          py::arg("nonneg") = false, py::arg("max_iters") = 20000,
          py::arg("tol_primal") = 1e-6, py::arg("tol_dual") = 1e-6,
          py::arg("seed") = 0);

    m.def("solve_tv",
          [](const Projector& p, const Arr& sino, double epsilon, double beta0,
             double beta_red, int n_tv_steps, double alpha0, double alpha_red,
             double r_max, double delta, int max_iters, bool nonneg) {
              tomo::TvOptions opts;
              opts.epsilon = epsilon;
              opts.beta0 = beta0;
              opts.beta_red = beta_red;
              opts.n_tv_steps = n_tv_steps;
              opts.alpha0 = alpha0;
              opts.alpha_red = alpha_red;
              opts.r_max = r_max;
              opts.delta = delta;
              opts.max_iters = max_iters;
              opts.nonneg = nonneg;
              return result_dict(tomo::solve_tv_asdpocs(
                  p.matrix(), sinogram_from(sino), p.geom().grid_width,
                  p.geom().grid_height, opts));
          },
          py::arg("projector"), py::arg("sinogram"), py::arg("epsilon") = 0.0,
          py::arg("beta0") = 1.0, py::arg("beta_red") = 0.995,
          py::arg("n_tv_steps") = 20, py::arg("alpha0") = 0.2,
          py::arg("alpha_red") = 0.95, py::arg("r_max") = 0.95,
          py::arg("delta") = 1e-8, py::arg("max_iters") = 10000,
          py::arg("nonneg") = true);
}
