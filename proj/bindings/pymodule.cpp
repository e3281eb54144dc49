#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bnprune/config.hpp"
#include "bnprune/mirror.hpp"
#include "bnprune/schedule.hpp"
#include "bnprune/simdata.hpp"
#include "bnprune/spikeslab.hpp"
#include "bnprune/trainer.hpp"

namespace py = pybind11;
using namespace bnprune;

namespace {

py::dict generate_dataset(int example, std::size_t n, std::size_t p,
                          std::uint64_t seed) {
  const std::size_t width = p != 0 ? p : default_p(example);
  const Rng base(seed);
  SimDataset ds = gen_predictors(n, width, base.fork(10));
  gen_response(example, ds, base.fork(11));

  std::vector<std::vector<double>> rows(ds.n);
  for (std::size_t r = 0; r < ds.n; ++r) {
    rows[r].assign(ds.x.begin() + static_cast<std::ptrdiff_t>(r * ds.p),
                   ds.x.begin() + static_cast<std::ptrdiff_t>((r + 1) * ds.p));
  }
  py::dict d;
  d["x"] = rows;
  d["y"] = ds.y;
  d["truth"] = truth_variables(example);
  return d;
}

py::dict train(const std::string& config_text) {
  const RunConfig cfg = parse_config(config_text);
  const TrainResult res = train_run(cfg);

  py::dict d;
  d["selected"] = res.selection.selected;
  d["s_hat"] = res.selection.s_hat;
  d["fdr"] = res.selection.fdr;
  d["fndr"] = res.selection.fndr;
  d["truth"] = res.truth;
  d["iterations"] = res.iterations;
  d["params"] = res.params;
  d["hard_sparsity"] = res.metrics.back().hard_sparsity;
  d["soft_sparsity"] = res.metrics.back().soft_sparsity;
  d["snapshots"] = res.snapshots.members.size();
  if (res.test_rows > 0) {
    if (res.spec.output == OutputKind::regression) {
      d["test_mse"] = res.ensemble_test.mse;
    } else {
      d["test_accuracy"] = res.ensemble_test.accuracy;
    }
  }
  py::list metrics;
  for (const MetricsRecord& r : res.metrics) {
    py::dict m;
    m["epoch"] = r.epoch;
    m["train_loss"] = r.train_loss;
    m["test_metric"] = r.test_metric;
    m["lr"] = r.lr;
    m["hard_sparsity"] = r.hard_sparsity;
    m["soft_sparsity"] = r.soft_sparsity;
    m["snapshots"] = r.snapshots;
    metrics.append(m);
  }
  d["metrics"] = metrics;
  return d;
}

}  // namespace

PYBIND11_MODULE(bnprune_core, m) {
  m.doc() = "Sparse Bayesian neural network training, pruning and selection";

  m.def("dual_map", &dual_map, py::arg("tau"),
        "Dual coordinate log(tau/(1-tau)) of a scale in (0,1).");
  m.def("primal_map", &primal_map, py::arg("rho"),
        "Scale sigmoid(rho), the inverse of dual_map.");
  m.def("lambda1_threshold", &lambda1_threshold, py::arg("delta0"), py::arg("delta1"),
        py::arg("prior_p"), py::arg("group_size"),
        "Closed-form spike/slab decision threshold on a group's mean square.");
  m.def("cyclical_lr", &cyclical_lr, py::arg("t"), py::arg("total_iters"),
        py::arg("cycles"), py::arg("l0"),
        "Cosine learning rate with warm restarts; t is 1-based.");
  m.def(
      "equivalence_params",
      [](double l, double h, double k) {
        const EquivalenceParams ep = equivalence_params(l, h, k);
        return py::make_tuple(ep.dt, ep.alpha, ep.beta1);
      },
      py::arg("l"), py::arg("h"), py::arg("k"),
      "Map a learning-rate run to sampler step size, noise scale and momentum; "
      "returns (dt, alpha, beta1).");
  m.def("generate_dataset", &generate_dataset, py::arg("example"), py::arg("n"),
        py::arg("p") = 0, py::arg("seed") = 1,
        "Benchmark rows as {'x': n x p, 'y': n, 'truth': signal variables}; "
        "p = 0 uses the example's default width.");
  m.def("train", &train, py::arg("config_text"),
        "Run a full training loop from config text; returns the selection "
        "report, final parameters and per-epoch metrics.");
}
