#include "sparsegpt/bench.hpp"
#include "sparsegpt/costmodel.hpp"
#include "sparsegpt/pruner.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

namespace py = pybind11;
using namespace sparsegpt;

namespace {

constexpr std::size_t kDefaultThreshold = MatMulBackend::kDefaultStrassenThreshold;

using InArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_dense(const InArray& a, const char* what)
{
    if (a.ndim() != 2) {
        throw ShapeError(std::string(what) + " must be a 2-D array");
    }
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return DenseMatrix(rows, cols, std::span<const double>(a.data(), rows * cols));
}

py::array_t<double> to_numpy(ConstMatrixView m)
{
    py::array_t<double> out({m.rows(), m.cols()});
    double* dst = out.mutable_data();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::memcpy(dst + r * m.cols(), m.row(r).data(), m.cols() * sizeof(double));
    }
    return out;
}

py::array_t<bool> mask_to_numpy(const BinaryMask& mask)
{
    py::array_t<bool> out({mask.rows(), mask.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < mask.rows(); ++r) {
        for (std::size_t c = 0; c < mask.cols(); ++c) {
            view(r, c) = mask(r, c);
        }
    }
    return out;
}

py::dict counts_dict(const OpCounts& c)
{
    py::dict d;
    d["mul"] = c.mul;
    d["add"] = c.add;
    d["div"] = c.div;
    d["compare"] = c.compare;
    return d;
}

py::dict ledger_dict(const FlopLedger& ledger)
{
    py::dict d;
    for (Phase p : kAllPhases) {
        d[py::str(std::string(phase_name(p)))] = counts_dict(ledger[p]);
    }
    return d;
}

MatMulBackend backend_from(const std::string& name, std::size_t threshold)
{
    auto b = MatMulBackend::parse(name);
    if (b.kind == MatMulBackend::Kind::Strassen) {
        b = MatMulBackend::strassen(threshold);
    }
    return b;
}

ExecMode mode_from(const std::string& name)
{
    if (name == "deterministic") {
        return ExecMode::Deterministic;
    }
    if (name == "performance") {
        return ExecMode::Performance;
    }
    throw ConfigError("mode must be 'deterministic' or 'performance'");
}

py::dict prune(const InArray& weights, const InArray& calib, double sparsity, std::size_t block,
               std::size_t mask_block, std::optional<double> lambda, const std::string& backend,
               std::size_t threshold, const std::string& mode, bool lazy)
{
    PruneConfig cfg;
    cfg.sparsity = sparsity;
    cfg.block = block;
    cfg.mask_block = mask_block;
    cfg.lambda = lambda;
    cfg.backend = backend_from(backend, threshold);
    cfg.mode = mode_from(mode);
    const auto w = to_dense(weights, "weights");
    const auto x = to_dense(calib, "calib");
    PruneResult res;
    {
        py::gil_scoped_release release;
        res = lazy ? prune_lazy(cfg, w, x) : prune_eager(cfg, w, x);
    }
    py::dict out;
    out["weights"] = to_numpy(res.weights);
    out["mask"] = mask_to_numpy(res.mask);
    out["flops"] = ledger_dict(res.ledger);
    py::dict secs;
    for (Phase p : kAllPhases) {
        secs[py::str(std::string(phase_name(p)))] = res.seconds_in(p);
    }
    out["seconds"] = secs;
    return out;
}

py::dict report_dict(const CostReport& r)
{
    py::dict d;
    d["a"] = r.a;
    d["hessian"] = r.hessian;
    d["inner"] = r.inner;
    d["outer"] = r.outer;
    d["total"] = r.total;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Blocked SparseGPT pruning with lazy updates, flop accounting and a cost model.";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<FormatError>(m, "FormatError", error.ptr());
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", error.ptr());
    py::register_exception<DegenerateCalibrationError>(m, "DegenerateCalibrationError", error.ptr());
    py::register_exception<SingularityError>(m, "SingularityError", error.ptr());
    py::register_exception<DegenerateDiagonalError>(m, "DegenerateDiagonalError", error.ptr());

    m.def("prune", &prune, py::arg("weights"), py::arg("calib"), py::arg("sparsity"), py::arg("block"), py::arg("mask_block"),
        py::arg("lam") = py::none(), py::arg("backend") = "classical",
        py::arg("threshold") = kDefaultThreshold, py::arg("mode") = "deterministic", py::arg("lazy") = true,
        "Prune a d x d weight matrix; returns a dict with weights, mask, flops and seconds.");

    m.def(
        "inverse_hessian",
        [](const InArray& calib, std::optional<double> lambda) {
            const auto h = build_inverse_hessian(to_dense(calib, "calib"), lambda);
            return py::make_tuple(to_numpy(h.h), h.lambda);
        },
        py::arg("calib"), py::arg("lam") = py::none(), "(X X^T + lambda I)^{-1} and the lambda used.");

    m.def(
        "matmul",
        [](const InArray& a, const InArray& b, const std::string& backend, std::size_t threshold) {
            OpCounts counts;
            const auto c = matmul(to_dense(a, "a"), to_dense(b, "b"), backend_from(backend, threshold), &counts);
            return py::make_tuple(to_numpy(c), counts_dict(counts));
        },
        py::arg("a"), py::arg("b"), py::arg("backend") = "classical", py::arg("threshold") = kDefaultThreshold,
        "Matrix product and its op counts.");

    m.def(
        "predicted_flops",
        [](std::size_t d, std::size_t block, const std::string& backend, std::size_t threshold) {
            return ledger_dict(predicted_flops(d, block, backend_from(backend, threshold)));
        },
        py::arg("d"), py::arg("block"), py::arg("backend") = "classical",
        py::arg("threshold") = kDefaultThreshold);

    m.def(
        "generate_instance",
        [](std::size_t d, std::uint64_t seed, bool integer) {
            const auto inst = integer ? generate_integer_instance(d, seed) : generate_instance(d, seed);
            return py::make_tuple(to_numpy(inst.weights), to_numpy(inst.calib));
        },
        py::arg("d"), py::arg("seed"), py::arg("integer") = false, "Seeded (W, X) pair.");

    py::class_<OmegaCurve>(m, "OmegaCurve")
        .def(py::init([](const std::vector<std::pair<double, double>>& anchors) {
                 std::vector<OmegaCurve::Anchor> pts;
                 for (const auto& [a, w] : anchors) {
                     pts.push_back({a, w});
                 }
                 return OmegaCurve(std::move(pts));
             }),
             py::arg("anchors"))
        .def_static("default", &OmegaCurve::default_curve)
        .def_static("classical", &OmegaCurve::classical)
        .def_static("from_csv", &OmegaCurve::from_csv_file, py::arg("path"))
        .def("with_anchor", &OmegaCurve::with_anchor, py::arg("a"), py::arg("omega"))
        .def("__call__", &OmegaCurve::evaluate, py::arg("a"))
        .def_property_readonly("omega", &OmegaCurve::omega)
        .def_property_readonly("alpha", &OmegaCurve::alpha)
        .def_property_readonly("anchors", [](const OmegaCurve& c) {
            std::vector<std::pair<double, double>> out;
            for (const auto& p : c.anchors()) {
                out.emplace_back(p.a, p.omega);
            }
            return out;
        });

    m.def(
        "cost_report", [](const OmegaCurve& curve, double a) { return report_dict(cost_report(curve, a)); },
        py::arg("curve"), py::arg("a"));
    m.def(
        "optimize_block_exponent",
        [](const OmegaCurve& curve, double step) {
            const auto best = optimize_block_exponent(curve, step);
            return py::make_tuple(best.a, best.total);
        },
        py::arg("curve"), py::arg("step") = kDefaultGridStep, "(a*, total exponent) by grid search.");
}
