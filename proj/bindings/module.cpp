#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ymflow/bundle.hpp"
#include "ymflow/classify.hpp"
#include "ymflow/kempf_ness.hpp"
#include "ymflow/lie.hpp"
#include "ymflow/sampling.hpp"
#include "ymflow/snapshot.hpp"
#include "ymflow/verify.hpp"
#include "ymflow/weights.hpp"

namespace py = pybind11;
using namespace ymflow;

namespace {

std::pair<long long, long long> rat_pair(const Rational& r) {
  return {numerator(r).convert_to<long long>(), denominator(r).convert_to<long long>()};
}

py::dict hn_dict(const FiltrationSpec& hn, const std::vector<BundleType>& signatures) {
  py::dict out;
  py::list blocks;
  for (auto& [n, k] : hn.blocks) blocks.append(py::make_tuple(n, k));
  out["hn_blocks"] = blocks;
  py::list poly;
  for (auto& [x, y] : polygon(hn).vertices) poly.append(py::make_tuple(x, y));
  out["polygon_vertices"] = poly;
  py::list cv;
  for (const auto& r : char_vector(hn)) cv.append(rat_pair(r));
  out["char_vector"] = cv;
  if (hn.blocks.size() >= 2) {
    const DominantWeightResult dw = dominant_weight(hn);
    out["dominant_lambda"] = dw.lambdas;
    out["dominant_norm"] = dw.norm;
  } else {
    out["dominant_lambda"] = py::none();
    out["dominant_norm"] = py::none();
  }
  const AlgebraicClassification cls = classify_algebraic(hn.total(), signatures);
  out["classification"] = cls.cls == StabilityClass::Stable      ? "stable"
                          : cls.cls == StabilityClass::Unstable ? "unstable"
                                                                : "semistable";
  return out;
}

FlowConfig flow_config_from(const py::dict& d) {
  FlowConfig cfg;
  if (d.contains("grad_tol")) cfg.grad_tol = d["grad_tol"].cast<double>();
  if (d.contains("max_steps")) cfg.max_steps = d["max_steps"].cast<long long>();
  if (d.contains("cfl_factor")) cfg.cfl_factor = d["cfl_factor"].cast<double>();
  if (d.contains("record_every")) cfg.record_every = d["record_every"].cast<int>();
  if (d.contains("dt_init")) cfg.dt_init = d["dt_init"].cast<double>();
  if (d.contains("dt_max")) cfg.dt_max = d["dt_max"].cast<double>();
  return cfg;
}

LieSection diag_section_of(const UnitaryConnection& a, const std::vector<double>& entries) {
  if (static_cast<int>(entries.size()) != a.n())
    throw std::invalid_argument("diagonal xi needs n entries");
  Mat m = Mat::Zero(a.n(), a.n());
  for (int k = 0; k < a.n(); ++k) m(k, k) = Complex(0.0, entries[k]);
  return constant_section(a, m);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Yang-Mills gradient flow and slope-stability toolkit on the torus";

  // ---- exact bundle combinatorics ----
  m.def(
      "slope",
      [](long long rank, long long degree) { return rat_pair(slope({rank, degree})); },
      py::arg("rank"), py::arg("degree"),
      "slope mu(E) = degree/rank as an exact (numerator, denominator) pair");

  m.def(
      "hn_split",
      [](const std::vector<long long>& degrees) {
        const FiltrationSpec hn = hn_split(degrees);
        auto sigs = split_oracle(degrees)->admissible(hn.total());
        return hn_dict(hn, sigs ? *sigs : std::vector<BundleType>{});
      },
      py::arg("degrees"),
      "Harder-Narasimhan data of a direct sum of line bundles");

  m.def(
      "dominant_weight",
      [](const std::vector<std::pair<long long, long long>>& blocks) {
        FiltrationSpec hn{blocks};
        const DominantWeightResult dw = dominant_weight(hn);
        py::dict out;
        out["lambdas"] = dw.lambdas;
        out["norm"] = dw.norm;
        out["norm_sq_exact"] = rat_pair(dw.norm_sq_exact);
        return out;
      },
      py::arg("blocks"), "normalized dominant weight of a strictly-decreasing filtration");

  m.def(
      "c1_ad_parabolic",
      [](long long rf, long long df, long long re, long long de) {
        return rat_pair(c1_ad_parabolic({rf, df}, {re, de}));
      },
      py::arg("sub_rank"), py::arg("sub_degree"), py::arg("rank"), py::arg("degree"));

  // ---- matrix Lie theory ----
  m.def(
      "roots_type_a",
      [](int n) {
        const RootDatum rd = roots_type_A(n);
        auto conv = [](const std::vector<std::vector<Rational>>& vs) {
          py::list out;
          for (const auto& v : vs) {
            py::list row;
            for (const auto& r : v) row.append(rat_pair(r));
            out.append(row);
          }
          return out;
        };
        py::dict out;
        out["n"] = rd.n;
        out["rank"] = rd.rank;
        out["roots"] = conv(rd.roots);
        out["simple_roots"] = conv(rd.simple_roots);
        out["dual_basis"] = conv(rd.dual_basis);
        return out;
      },
      py::arg("n"), "type-A root data with the exact dual basis");

  m.def(
      "eigen_split",
      [](const Eigen::MatrixXcd& xi, double tol) {
        const EigenSplit sp = eigen_split(AlgebraElement::compact(xi), tol);
        return py::make_tuple(sp.eigenvalues, sp.multiplicities, sp.projectors);
      },
      py::arg("xi"), py::arg("tol") = 1e-9,
      "(eigenvalues, multiplicities, projectors) of i*xi with merged blocks");

  m.def(
      "inner_product",
      [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
        return inner_product(AlgebraElement::compact(a), AlgebraElement::compact(b));
      },
      py::arg("xi"), py::arg("eta"));

  m.def(
      "parabolic_membership",
      [](const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& xi, double tol) {
        return parabolic_membership(g, AlgebraElement::compact(xi), tol);
      },
      py::arg("g"), py::arg("xi"), py::arg("tol") = 1e-8);

  m.def(
      "chamber_coordinates",
      [](const Eigen::MatrixXcd& xi) {
        const RootDatum rd = roots_type_A(static_cast<int>(xi.rows()));
        const ChamberCoordinates cc = chamber_coordinates(AlgebraElement::compact(xi), rd);
        return py::make_tuple(cc.x, cc.central, cc.u);
      },
      py::arg("xi"), "(x, central, u) with u xi u^* in the closed chamber");

  // ---- lattice connections and the flow ----
  py::class_<UnitaryConnection>(m, "Connection")
      .def_static(
          "flat",
          [](int N, const std::string& kind, int n) {
            return make_flat_connection(make_geometry(N),
                                        MatrixGroupSpec{n, kind == "SU" ? GroupKind::SU
                                                                        : GroupKind::U});
          },
          py::arg("N"), py::arg("kind") = "SU", py::arg("n") = 2)
      .def_static(
          "split_standard",
          [](int N, const std::vector<long long>& degrees) {
            return make_split_connection(make_geometry(N), degrees);
          },
          py::arg("N"), py::arg("degrees"))
      .def_static("load", &load_connection, py::arg("path"))
      .def("save", &save_connection, py::arg("path"))
      .def_property_readonly("N", &UnitaryConnection::N)
      .def_property_readonly("n", &UnitaryConnection::n)
      .def_property_readonly("degrees",
                             [](const UnitaryConnection& a) { return a.twist.degrees; })
      .def("energy", &ym_energy)
      .def("mu_norm", [](const UnitaryConnection& a) { return mu_norm(a, a.tau()); })
      .def(
          "degree",
          [](const UnitaryConnection& a, int k) {
            Mat p = Mat::Zero(a.n(), a.n());
            if (k < 0)
              p = Mat::Identity(a.n(), a.n());
            else
              p(k, k) = 1.0;
            return degree(a, p);
          },
          py::arg("factor") = -1,
          "Chern number of a diagonal factor (all factors when factor = -1)")
      .def(
          "random_gauge_image",
          [](const UnitaryConnection& a, uint64_t seed, double amplitude,
             const std::string& sampler, double secondary) {
            Rng rng(derive_seed(seed, "py_gauge", 0));
            GaugeTransform g =
                sampler == "parabolic"
                    ? random_parabolic_gauge(a.geo, a.twist, rng, amplitude, secondary)
                : sampler == "diagonal"
                    ? random_semistable_gauge(a.geo, a.twist, a.group.kind, rng,
                                              amplitude, secondary)
                    : random_gauge(a.geo, a.twist, a.group.kind, rng, amplitude, false);
            return gauge_act(g, a);
          },
          py::arg("seed"), py::arg("amplitude") = 0.25, py::arg("sampler") = "generic",
          py::arg("secondary") = 0.0,
          "image under a random complexified gauge transformation");

  m.def(
      "run_flow",
      [](const UnitaryConnection& a0, const py::dict& cfg) {
        const FlowTrace tr = run_flow(a0, flow_config_from(cfg));
        py::dict out;
        out["converged"] = tr.converged;
        out["steps"] = tr.steps;
        out["time"] = tr.time;
        out["stop_reason"] = tr.stop_reason;
        out["final_energy"] = ym_energy(tr.final);
        out["final_mu_norm"] = mu_norm(tr.final, tr.final.tau());
        py::list recs;
        for (const FlowRecord& r : tr.records)
          recs.append(py::make_tuple(r.step, r.time, r.energy, r.grad_norm, r.mu_norm));
        out["records"] = recs;
        return py::make_tuple(out, tr.final);
      },
      py::arg("connection"), py::arg("config") = py::dict(),
      "Yang-Mills gradient flow; returns (summary, final connection)");

  m.def(
      "classify",
      [](const UnitaryConnection& a0, const py::dict& cfg) {
        ClassifyConfig ccfg;
        ccfg.flow = flow_config_from(cfg);
        if (cfg.contains("refine_pair")) ccfg.refine_pair = cfg["refine_pair"].cast<bool>();
        const Classification cls = classify(a0, ccfg);
        py::dict out;
        out["label"] = to_string(cls.label);
        out["final_energy"] = cls.final_energy;
        out["m"] = cls.m;
        out["energy_band"] = cls.energy_band;
        out["lambda_min"] = cls.lambda_min;
        out["orbit_residual"] = cls.orbit_residual;
        out["converged"] = cls.converged;
        return out;
      },
      py::arg("connection"), py::arg("config") = py::dict());

  m.def(
      "weight",
      [](const UnitaryConnection& a, const std::vector<double>& xi_diag, double t_max,
         double cutoff) {
        WeightOptions opts;
        opts.t_max = t_max;
        opts.cutoff = cutoff;
        const WeightResult w = weight(a, diag_section_of(a, xi_diag), a.tau(), opts);
        py::dict out;
        out["finite"] = w.finite;
        out["value"] = w.finite ? py::cast(w.value) : py::none();
        out["tail_integral"] = w.tail_integral;
        out["t_stop"] = w.t_stop;
        out["divergence_reason"] = w.divergence_reason;
        return out;
      },
      py::arg("connection"), py::arg("xi_diag"), py::arg("t_max") = 200.0,
      py::arg("cutoff") = 1e-8,
      "weight along e^{it xi} for xi = i*diag(entries)");

  m.def(
      "kempf_ness",
      [](const UnitaryConnection& a, const std::vector<double>& xi_diag, int quad_n) {
        const KNEvaluation ev =
            kempf_ness_value(a, diag_section_of(a, xi_diag), a.tau(), quad_n);
        py::dict out;
        out["value"] = ev.value;
        out["quad_n"] = ev.quad_n;
        out["refinement_gap"] = ev.refinement_gap;
        out["min_second_difference"] = ev.min_second_difference;
        return out;
      },
      py::arg("connection"), py::arg("xi_diag"), py::arg("quad_n") = 256);

  m.def(
      "verify",
      [](uint64_t seed, bool quick, int threads) {
        VerifyOptions opts;
        opts.seed = seed;
        opts.quick = quick;
        opts.threads = threads;
        const ResultRecord rec = run_verify(opts);
        py::dict out;
        out["all_pass"] = rec.all_pass();
        out["wall_time_s"] = rec.wall_time_s;
        py::list asserts;
        for (const Assertion& a : rec.assertions)
          asserts.append(py::make_tuple(a.name, a.tolerance, a.measured, a.pass));
        out["assertions"] = asserts;
        return out;
      },
      py::arg("seed") = 1, py::arg("quick") = true, py::arg("threads") = 2,
      "run the invariant suite (quick=False is the full acceptance run)");

  m.attr("__version__") = "0.1.0";
}
