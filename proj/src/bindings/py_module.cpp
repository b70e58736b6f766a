#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wsaw/enumerate.hpp"
#include "wsaw/lace.hpp"
#include "wsaw/montecarlo.hpp"
#include "wsaw/scaling.hpp"
#include "wsaw/version.hpp"

namespace py = pybind11;
using namespace wsaw;

namespace {

py::tuple point_tuple(const Point& p) {
  py::tuple t(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) t[i] = p[i];
  return t;
}

py::dict point_map(const std::map<Point, double>& m) {
  py::dict d;
  for (const auto& [k, v] : m) d[point_tuple(k)] = v;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "weakly self-avoiding walk toolkit: exact enumeration, lace "
            "expansion, chain-growth and Metropolis sampling, scaling analysis";
  m.attr("__version__") = version_string;

  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](int dim, double beta, int r, int n) {
             ModelParams p{dim, beta, r, n};
             p.validate();
             return p;
           }),
           py::arg("dim"), py::arg("beta"), py::arg("r") = 0, py::arg("n") = 0)
      .def_readwrite("dim", &ModelParams::dim)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("r", &ModelParams::torus_r)
      .def_readwrite("n", &ModelParams::length)
      .def("is_torus", &ModelParams::torus)
      .def("volume", &ModelParams::volume)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(dim=" + std::to_string(p.dim) +
               ", beta=" + std::to_string(p.beta) + ", r=" + std::to_string(p.torus_r) +
               ", n=" + std::to_string(p.length) + ")";
      });

  py::class_<Walk>(m, "Walk")
      .def(py::init<int, std::vector<std::uint8_t>, int>(), py::arg("dim"),
           py::arg("steps"), py::arg("r") = 0)
      .def_static(
          "from_positions",
          [](const std::vector<std::vector<int>>& pos, int r) {
            std::vector<Point> pts;
            pts.reserve(pos.size());
            for (const auto& p : pos) pts.emplace_back(p.begin(), p.end());
            return Walk::from_positions(pts, r);
          },
          py::arg("positions"), py::arg("r") = 0)
      .def_property_readonly("dim", &Walk::dim)
      .def_property_readonly("n", &Walk::length)
      .def_property_readonly("r", &Walk::torus_side)
      .def("is_torus", &Walk::torus)
      .def("steps", [](const Walk& w) { return w.steps(); })
      .def("position", [](const Walk& w, int k) { return point_tuple(w.position(k)); })
      .def("positions",
           [](const Walk& w) {
             py::list out;
             for (const Point& p : w.positions()) out.append(point_tuple(p));
             return out;
           })
      .def("__eq__", [](const Walk& a, const Walk& b) { return a == b; })
      .def("__len__", &Walk::length);

  m.def("lift_walk", &lift_walk, py::arg("walk"));
  m.def("project_walk", &project_walk, py::arg("walk"), py::arg("r"));
  m.def("pair_interaction", &pair_interaction, py::arg("walk"), py::arg("s"),
        py::arg("t"));
  m.def("contact_count", &contact_count, py::arg("walk"), py::arg("a"), py::arg("b"));
  m.def("interaction_weight", &interaction_weight, py::arg("walk"), py::arg("beta"),
        py::arg("a"), py::arg("b"));
  m.def("contact_count_mod", &contact_count_mod, py::arg("walk"), py::arg("r"),
        py::arg("a"), py::arg("b"));
  m.def("interaction_weight_mod", &interaction_weight_mod, py::arg("walk"),
        py::arg("beta"), py::arg("r"), py::arg("a"), py::arg("b"));

  py::class_<EnumerationConfig>(m, "EnumerationConfig")
      .def(py::init<>())
      .def_readwrite("max_nodes", &EnumerationConfig::max_nodes)
      .def_readwrite("threads", &EnumerationConfig::threads);

  py::class_<EnumerationSummary>(m, "EnumerationSummary")
      .def_readonly("n", &EnumerationSummary::n)
      .def_readonly("c_n", &EnumerationSummary::c_n)
      .def_readonly("sum_sq_disp", &EnumerationSummary::sum_sq_disp)
      .def_property_readonly(
          "endpoint_weights",
          [](const EnumerationSummary& s) { return point_map(s.endpoint_weights); });

  m.def("enumerate_walks", &enumerate, py::arg("params"),
        py::arg("config") = EnumerationConfig{});
  m.def("enumerate_torus_via_lift", &enumerate_torus_via_lift, py::arg("params"),
        py::arg("config") = EnumerationConfig{});
  m.def(
      "enumerate_sequence",
      [](const ModelParams& p, int n_max, const EnumerationConfig& cfg) {
        SequenceSummary s = enumerate_sequence(p, n_max, cfg);
        return py::make_tuple(s.c, s.sum_sq_disp);
      },
      py::arg("params"), py::arg("n_max"), py::arg("config") = EnumerationConfig{});
  m.def("connective_ratio_sequence", &connective_ratio_sequence, py::arg("params"),
        py::arg("n_max"), py::arg("config") = EnumerationConfig{});
  m.def(
      "two_point_series",
      [](const ModelParams& p, double z, int n_max, const EnumerationConfig& cfg) {
        TwoPointTable t = two_point_series(p, z, n_max, cfg);
        py::dict out;
        out["z"] = t.z;
        out["n_max"] = t.n_max;
        out["values"] = point_map(t.values);
        out["susceptibility_partial"] = t.susceptibility_partial;
        out["truncation_last_term"] = t.truncation_last_term;
        return out;
      },
      py::arg("params"), py::arg("z"), py::arg("n_max"),
      py::arg("config") = EnumerationConfig{});

  m.def(
      "enumerate_laces",
      [](int a, int b, int n_max_edges) {
        py::list out;
        for (const Lace& l : enumerate_laces({a, b}, n_max_edges)) {
          py::list edges;
          for (auto [s, t] : l.edges) edges.append(py::make_tuple(s, t));
          out.append(edges);
        }
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("n_max_edges") = 64);
  m.def(
      "j_value",
      [](const Walk& w, int a, int b, const ModelParams& p) {
        return j_value(w, {a, b}, p);
      },
      py::arg("walk"), py::arg("a"), py::arg("b"), py::arg("params"));
  m.def("kjk_residual", &kjk_residual, py::arg("walk"), py::arg("m"), py::arg("params"));
  m.def(
      "kjk_residual_exact",
      [](const Walk& w, int m, long long num, long long den) {
        Rational r = kjk_residual_exact(w, m, Rational(num, den));
        return py::make_tuple(r.is_zero(), r.to_string());
      },
      py::arg("walk"), py::arg("m"), py::arg("beta_num"), py::arg("beta_den"));
  m.def(
      "pi_series_partial",
      [](const ModelParams& p, double z, int n_max, const EnumerationConfig& cfg) {
        py::list out;
        for (const PiSeriesRow& row : pi_series_partial(p, z, n_max, cfg))
          out.append(py::make_tuple(row.n, row.term, row.partial_sum));
        return out;
      },
      py::arg("params"), py::arg("z"), py::arg("n_max"),
      py::arg("config") = EnumerationConfig{});

  py::class_<ChainGrowthConfig>(m, "ChainGrowthConfig")
      .def(py::init<>())
      .def_readwrite("tours", &ChainGrowthConfig::tours)
      .def_readwrite("enrich_threshold", &ChainGrowthConfig::enrich_threshold)
      .def_readwrite("prune_threshold", &ChainGrowthConfig::prune_threshold)
      .def_readwrite("seed", &ChainGrowthConfig::seed)
      .def_readwrite("threads", &ChainGrowthConfig::threads);

  py::class_<MetropolisConfig>(m, "MetropolisConfig")
      .def(py::init<>())
      .def_readwrite("sweeps", &MetropolisConfig::sweeps)
      .def_readwrite("thermalization", &MetropolisConfig::thermalization)
      .def_readwrite("pivot_fraction", &MetropolisConfig::pivot_fraction)
      .def_readwrite("local_moves", &MetropolisConfig::local_moves)
      .def_readwrite("seed", &MetropolisConfig::seed)
      .def_readwrite("chains", &MetropolisConfig::chains)
      .def_readwrite("threads", &MetropolisConfig::threads);

  py::class_<EstimateWithError>(m, "EstimateWithError")
      .def_readonly("mean", &EstimateWithError::mean)
      .def_readonly("std_error", &EstimateWithError::std_error)
      .def_readonly("n_effective", &EstimateWithError::n_effective)
      .def_readonly("log_mean", &EstimateWithError::log_mean)
      .def("__repr__", [](const EstimateWithError& e) {
        return "EstimateWithError(mean=" + std::to_string(e.mean) +
               ", std_error=" + std::to_string(e.std_error) + ")";
      });

  m.def("perm_partition_estimate", &perm_partition_estimate, py::arg("params"),
        py::arg("config"));
  m.def("metropolis_sample", &metropolis_sample, py::arg("params"), py::arg("config"),
        py::arg("observables"));
  m.def("sample_paths", &sample_paths, py::arg("params"), py::arg("config"),
        py::arg("count"));

  py::class_<MetropolisSampler>(m, "MetropolisSampler")
      .def(py::init<const ModelParams&, const MetropolisConfig&>(), py::arg("params"),
           py::arg("config"))
      .def("step", &MetropolisSampler::step)
      .def("sweep", &MetropolisSampler::sweep)
      .def("set_state", &MetropolisSampler::set_state)
      .def("snapshot", &MetropolisSampler::snapshot)
      .def_property_readonly("contacts", &MetropolisSampler::contacts)
      .def_property_readonly("end_norm_sq", &MetropolisSampler::end_norm_sq)
      .def_property_readonly("acceptance_rate", &MetropolisSampler::acceptance_rate);

  py::class_<RescaledPath>(m, "RescaledPath")
      .def_readonly("dim", &RescaledPath::dim)
      .def_readonly("torus_ambient", &RescaledPath::torus_ambient)
      .def_readonly("horizon", &RescaledPath::horizon)
      .def_readonly("times", &RescaledPath::times)
      .def_readonly("points", &RescaledPath::points)
      .def("eval", &RescaledPath::eval, py::arg("t"));

  m.def("rescale", &rescale, py::arg("walk"), py::arg("r_scale"));
  m.def("lift_path", &lift_path, py::arg("path"));
  m.def("project_path", &project_path, py::arg("path"));
  m.def("gaussian_fdd_reference", &gaussian_fdd_reference, py::arg("dim"),
        py::arg("times"), py::arg("freqs"));
  m.def("standard_frequency_grid", &standard_frequency_grid, py::arg("dim"),
        py::arg("blocks"));
  m.def(
      "fdd_statistic",
      [](const std::vector<Walk>& paths, const std::vector<double>& times,
         const std::vector<std::vector<std::vector<double>>>& freq_grid, double k_scale,
         double d_hat) {
        IncrementSpec spec{times, freq_grid, k_scale};
        FddResult res = fdd_statistic(paths, spec, d_hat);
        py::list pts;
        for (const FddPoint& p : res.points)
          pts.append(py::make_tuple(p.empirical, p.reference, p.abs_deviation));
        return py::make_tuple(pts, res.deviation);
      },
      py::arg("paths"), py::arg("times"), py::arg("freq_grid"), py::arg("k_scale"),
      py::arg("d_hat"));
  m.def(
      "diffusion_fit",
      [](const std::map<int, double>& msd, int n_min, int n_max) {
        DiffusionFit f = diffusion_fit(msd, n_min, n_max);
        return py::make_tuple(f.d_hat, f.residual);
      },
      py::arg("msd_by_n"), py::arg("n_min"), py::arg("n_max"));
  m.def("tightness_bound", &tightness_bound, py::arg("paths"), py::arg("r_scale"),
        py::arg("grid"));
  m.def(
      "dilute_ratio_exact",
      [](int dim, double beta, int r, int n_min, int n_max,
         const EnumerationConfig& cfg) {
        py::list out;
        for (const DiluteRow& row : dilute_ratio_exact(dim, beta, r, n_min, n_max, cfg))
          out.append(py::make_tuple(row.n, row.r, row.ratio, row.bound_shape));
        return out;
      },
      py::arg("dim"), py::arg("beta"), py::arg("r"), py::arg("n_min"), py::arg("n_max"),
      py::arg("config") = EnumerationConfig{});
  m.def(
      "degenerate_tail_probability",
      [](const ModelParams& p, const MetropolisConfig& cfg, double eps, int samples) {
        DegenerateRow row = degenerate_tail_probability(p, cfg, eps, samples);
        return py::make_tuple(row.p_hat, row.std_error, row.samples);
      },
      py::arg("params"), py::arg("config"), py::arg("epsilon"), py::arg("samples"));
}
