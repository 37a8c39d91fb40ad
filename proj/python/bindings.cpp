// Thin bindings: models, options and results cross the boundary as JSON text
// in the same schema the CLI reads and writes; data crosses as float64 arrays.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "svarma/diagnostics.hpp"
#include "svarma/error.hpp"
#include "svarma/estimate.hpp"
#include "svarma/filter.hpp"
#include "svarma/io.hpp"
#include "svarma/irf.hpp"
#include "svarma/likelihood.hpp"
#include "svarma/model.hpp"

namespace py = pybind11;
using svarma::io::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Model {
    svarma::SvarmaSpec spec;
    svarma::ThetaVector theta;
};

svarma::SvarmaSpec spec_of(const std::string& model) { return svarma::io::spec_from_json(json::parse(model)); }

Model model_of(const std::string& model) {
    const json j = json::parse(model);
    Model m{svarma::io::spec_from_json(j), {}};
    m.theta = svarma::io::theta_from_json(m.spec, j);
    return m;
}

svarma::EstimateOptions options_of(const std::string& options) {
    return options.empty() ? svarma::EstimateOptions{} : svarma::io::options_from_json(json::parse(options));
}

std::vector<std::string> default_names(Eigen::Index n, const char* stem) {
    std::vector<std::string> names;
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(stem + std::to_string(i + 1));
    return names;
}

}  // namespace

PYBIND11_MODULE(_svarma, m) {
    m.doc() = "Structural VARMA models with non-Gaussian shocks (compiled core)";

    static py::exception<svarma::Error> error(m, "SvarmaError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const svarma::Error& e) {
            const std::string kind(svarma::to_string(e.kind()));
            py::set_error(error, (kind + ": " + e.what()).c_str());
        } catch (const json::exception& e) {
            py::set_error(error, (std::string("parse: ") + e.what()).c_str());
        }
    });

    m.def(
        "simulate",
        [](const std::string& model, int T, std::uint64_t seed, int burnin) {
            const Model md = model_of(model);
            svarma::Rng rng(seed);
            py::gil_scoped_release release;
            return svarma::simulate(md.spec, md.theta, T, rng, burnin).y;
        },
        py::arg("model"), py::arg("T"), py::arg("seed"), py::arg("burnin"));

    m.def(
        "validate",
        [](const std::string& model) {
            const Model md = model_of(model);
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& v : svarma::validate(md.spec, md.theta)) out.emplace_back(v.code, v.message);
            return out;
        },
        py::arg("model"));

    m.def(
        "loglik",
        [](const std::string& model, const MatrixXd& y) {
            const Model md = model_of(model);
            return svarma::loglik(md.spec, md.theta, y);
        },
        py::arg("model"), py::arg("y"));

    m.def(
        "score",
        [](const std::string& model, const MatrixXd& y) {
            const Model md = model_of(model);
            return VectorXd(svarma::score(md.spec, md.theta, y));
        },
        py::arg("model"), py::arg("y"));

    m.def(
        "structural_shocks",
        [](const std::string& model, const MatrixXd& y) {
            const Model md = model_of(model);
            const auto s = svarma::structural_shocks(md.spec, md.theta, y);
            return std::make_pair(s.eps, s.standardized);
        },
        py::arg("model"), py::arg("y"));

    m.def(
        "fit",
        [](const MatrixXd& y, const std::string& model, const std::string& options, bool use_start) {
            const json j = json::parse(model);
            const svarma::SvarmaSpec spec = svarma::io::spec_from_json(j);
            std::optional<svarma::ThetaVector> start;
            if (use_start) start = svarma::io::theta_from_json(spec, j);
            const svarma::EstimateOptions o = options_of(options);
            svarma::EstimationResult r;
            {
                py::gil_scoped_release release;
                r = svarma::fit(y, spec, o, start);
            }
            return svarma::io::to_json(r).dump();
        },
        py::arg("y"), py::arg("model"), py::arg("options"), py::arg("use_start"));

    m.def(
        "select_order",
        [](const MatrixXd& y, const std::string& model, int p_max, int q_max, const std::string& options,
           unsigned threads) {
            const svarma::SvarmaSpec tmpl = spec_of(model);
            svarma::EstimateOptions o = options_of(options);
            o.covariance = false;
            svarma::OrderSelection s;
            {
                py::gil_scoped_release release;
                s = svarma::select_order(y, tmpl, p_max, q_max, o, threads);
            }
            return svarma::io::to_json(s).dump();
        },
        py::arg("y"), py::arg("model"), py::arg("p_max"), py::arg("q_max"), py::arg("options"), py::arg("threads"));

    m.def(
        "irf",
        [](const std::string& model, int horizon, const std::string& shock_size, int bootstrap,
           const std::optional<MatrixXd>& y, double level, std::uint64_t seed, unsigned threads,
           const std::string& options) {
            const Model md = model_of(model);
            const svarma::ShockSize size = svarma::shock_size_from_string(shock_size);
            svarma::IrfResult res;
            if (bootstrap > 0) {
                if (!y) throw svarma::Error(svarma::ErrorKind::invalid_argument, "irf: bootstrap bands need the data y");
                svarma::BootstrapOptions b;
                b.replications = bootstrap;
                b.level = level;
                b.seed = seed;
                b.threads = threads;
                b.shock_size = size;
                b.estimate = options_of(options);
                py::gil_scoped_release release;
                res = svarma::bootstrap_irf(md.spec, md.theta, *y, horizon, b);
            } else {
                res = svarma::irf(md.spec, md.theta, horizon, size);
            }
            return svarma::io::to_json(res, default_names(md.spec.n, "y")).dump();
        },
        py::arg("model"), py::arg("horizon"), py::arg("shock_size"), py::arg("bootstrap"), py::arg("y"),
        py::arg("level"), py::arg("seed"), py::arg("threads"), py::arg("options"));

    m.def(
        "diagnostics",
        [](const MatrixXd& residuals, int lags) {
            const auto d = svarma::diagnostics(residuals, lags);
            return svarma::io::to_json(d, default_names(residuals.cols(), "shock"), lags).dump();
        },
        py::arg("residuals"), py::arg("lags"));

    m.def(
        "normalize",
        [](const MatrixXd& B, const VectorXd& sigma, const std::string& scheme) {
            const svarma::Normalized r = svarma::normalize(svarma::scheme_from_string(scheme), B, sigma);
            return py::make_tuple(r.B, r.sigma, r.perm, r.d);
        },
        py::arg("B"), py::arg("sigma"), py::arg("scheme"));
}
