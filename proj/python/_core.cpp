#include <bit>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbss/baselines.hpp"
#include "qbss/datagen.hpp"
#include "qbss/errors.hpp"
#include "qbss/experiments.hpp"
#include "qbss/hybrid.hpp"
#include "qbss/qas.hpp"
#include "qbss/qsim.hpp"
#include "qbss/regress.hpp"

namespace py = pybind11;
using namespace qbss;

namespace {

LossTable to_table(const std::vector<double>& values) {
  const auto size = values.size();
  if (size < 1 || (size & (size - 1)) != 0) raise(ErrorKind::InvalidArgument, "table length must be a power of two");
  LossTable table;
  table.p = std::countr_zero(size);
  table.values = values;
  return table;
}

Dataset dataset(Eigen::MatrixXd X, Eigen::VectorXd y) { return make_dataset(std::move(X), std::move(y)); }

SubsetIndex subset_of(const std::vector<int>& columns, int p) { return SubsetIndex::from_columns(columns, p); }

QasConfig qas_config(double lambda, double stop_constant, std::uint64_t seed,
                     std::optional<std::uint64_t> initial_benchmark) {
  QasConfig config;
  config.lambda = lambda;
  config.stop_constant = stop_constant;
  config.seed = seed;
  config.initial_benchmark = initial_benchmark;
  return config;
}

py::dict vote_dict(const HybridResult& result) {
  py::dict out;
  out["winner"] = result.vote.winner;
  out["winner_count"] = result.vote.winner_count;
  out["votes"] = result.vote.votes;
  out["grover_ops"] = result.grover_ops();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum adaptive search for best subset selection (classical simulation)";
  m.attr("__version__") = version();

  py::register_exception<Error>(m, "QbssError", PyExc_ValueError);

  // qsim
  m.def("grover_angle", &grover_angle, py::arg("dim"), py::arg("marked"));
  m.def(
      "grover_closed_form",
      [](std::uint64_t dim, std::uint64_t marked, std::uint64_t iterations) {
        const auto s = grover_closed_form(dim, marked, iterations);
        return py::make_tuple(s.alpha, s.beta);
      },
      py::arg("dim"), py::arg("marked"), py::arg("iterations"),
      "(alpha, beta) after `iterations` Grover operations from the uniform state.");
  m.def(
      "grover_statevector",
      [](std::uint64_t dim, const std::vector<std::uint64_t>& marked, std::uint64_t iterations) {
        std::vector<bool> flags(dim, false);
        for (auto i : marked) flags.at(i) = true;
        const auto state = grover_statevector(dim, MarkPredicate(dim, [&](std::uint64_t i) { return flags[i]; }),
                                              iterations);
        return std::vector<double>(state.amplitudes().begin(), state.amplitudes().end());
      },
      py::arg("dim"), py::arg("marked"), py::arg("iterations"));
  m.def("avg_success_prob", &avg_success_prob, py::arg("dim"), py::arg("marked"), py::arg("tau"));
  m.def("default_grover_iterations", &default_grover_iterations, py::arg("dim"));
  m.def(
      "grover_search",
      [](std::uint64_t dim, std::uint64_t oracle, std::optional<std::uint64_t> iterations, std::uint64_t seed) {
        Rng rng(seed);
        return grover_search(dim, oracle, iterations, rng);
      },
      py::arg("dim"), py::arg("oracle"), py::arg("iterations") = py::none(), py::arg("seed") = 0);

  // qas
  m.def("tau", &tau, py::arg("m"), py::arg("lam"));
  m.def(
      "qas_search",
      [](const std::vector<double>& table, double lambda, double stop_constant, std::uint64_t seed,
         std::optional<std::uint64_t> initial_benchmark) {
        const QasResult r = qas_search(to_table(table), qas_config(lambda, stop_constant, seed, initial_benchmark));
        py::list history;
        for (const auto& step : r.trace.benchmark_history) history.append(py::make_tuple(step.iteration, step.state, step.loss));
        py::dict out;
        out["state"] = r.outcome.state;
        out["loss"] = r.outcome.loss;
        out["iterations"] = r.outcome.iterations;
        out["grover_ops"] = r.outcome.grover_ops;
        out["benchmark_history"] = history;
        return out;
      },
      py::arg("table"), py::arg("lam") = 0.52, py::arg("stop_constant") = 3.0, py::arg("seed") = 0,
      py::arg("initial_benchmark") = py::none());

  // hybrid
  m.def("majority_vote", [](const std::vector<std::uint64_t>& votes) {
    const VoteResult r = majority_vote(votes);
    return py::make_tuple(r.winner, r.winner_count);
  });
  m.def(
      "hybrid_vote",
      [](const std::vector<double>& table, unsigned nodes, double lambda, double stop_constant, std::uint64_t seed) {
        HybridConfig config;
        config.nodes = nodes;
        config.qas = qas_config(lambda, stop_constant, 0, std::nullopt);
        config.master_seed = seed;
        return vote_dict(hybrid_vote(to_table(table), config));
      },
      py::arg("table"), py::arg("nodes") = 5, py::arg("lam") = 0.52, py::arg("stop_constant") = 3.0,
      py::arg("seed") = 0);
  m.def(
      "hybrid_select",
      [](Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::MatrixXd X_test, Eigen::VectorXd y_test, unsigned nodes,
         double lambda, double stop_constant, std::uint64_t seed) {
        HybridConfig config;
        config.nodes = nodes;
        config.qas = qas_config(lambda, stop_constant, 0, std::nullopt);
        config.master_seed = seed;
        const HybridResult r = hybrid_select(dataset(std::move(X), std::move(y)),
                                             dataset(std::move(X_test), std::move(y_test)), config);
        py::dict out = vote_dict(r);
        out["table"] = r.table.values;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("X_test"), py::arg("y_test"), py::arg("nodes") = 5, py::arg("lam") = 0.52,
      py::arg("stop_constant") = 3.0, py::arg("seed") = 0);
  m.def("kl_bernoulli", &kl_bernoulli, py::arg("a"), py::arg("b"));
  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("vote_lower_bound", &vote_lower_bound, py::arg("q"), py::arg("xi"));
  m.def("binomial_tail", &binomial_tail, py::arg("trials"), py::arg("q"), py::arg("threshold"));

  // regress
  m.def(
      "build_loss_table",
      [](Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::MatrixXd X_test, Eigen::VectorXd y_test,
         const std::string& kind, unsigned threads) {
        if (kind != "test_mse" && kind != "train_mse") raise(ErrorKind::InvalidArgument, "kind must be test_mse or train_mse");
        return build_loss_table(dataset(std::move(X), std::move(y)), dataset(std::move(X_test), std::move(y_test)),
                                kind == "test_mse" ? LossKind::TestMse : LossKind::TrainMse, threads)
            .values;
      },
      py::arg("X"), py::arg("y"), py::arg("X_test"), py::arg("y_test"), py::arg("kind") = "test_mse",
      py::arg("threads") = 1);
  m.def(
      "predict_svd",
      [](Eigen::MatrixXd X, Eigen::VectorXd y, const std::vector<int>& columns, const std::vector<double>& x_new) {
        const Dataset train = dataset(std::move(X), std::move(y));
        return predict_svd(train, subset_of(columns, static_cast<int>(train.p())), x_new);
      },
      py::arg("X"), py::arg("y"), py::arg("columns"), py::arg("x_new"));
  m.def(
      "pred_error",
      [](Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::MatrixXd X_test, Eigen::VectorXd y_test,
         const std::vector<int>& columns) {
        const Dataset train = dataset(std::move(X), std::move(y));
        return pred_error(train, dataset(std::move(X_test), std::move(y_test)),
                          subset_of(columns, static_cast<int>(train.p())));
      },
      py::arg("X"), py::arg("y"), py::arg("X_test"), py::arg("y_test"), py::arg("columns"));
  m.def(
      "qlp_recover",
      [](Eigen::MatrixXd X, Eigen::VectorXd y, const std::vector<int>& columns, const std::vector<double>& x_new,
         std::optional<double> c) {
        const Dataset train = dataset(std::move(X), std::move(y));
        const QlpRecovery r = qlp_recover(train, subset_of(columns, static_cast<int>(train.p())), x_new, c);
        py::dict out;
        out["offdiag"] = r.offdiag;
        out["p1"] = r.p1;
        out["c"] = r.c;
        out["y_hat"] = r.y_hat;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("columns"), py::arg("x_new"), py::arg("c") = py::none());

  // baselines
  m.def("exhaustive_bss", [](const std::vector<double>& table) { return exhaustive_bss(to_table(table)); },
        py::arg("table"));
  m.def(
      "forward_stepwise",
      [](Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::MatrixXd X_test, Eigen::VectorXd y_test) {
        return forward_stepwise(dataset(std::move(X), std::move(y)), dataset(std::move(X_test), std::move(y_test)))
            .columns();
      },
      py::arg("X"), py::arg("y"), py::arg("X_test"), py::arg("y_test"));
  m.def(
      "lasso_cv",
      [](Eigen::MatrixXd X, Eigen::VectorXd y, int folds, std::uint64_t seed) {
        Rng rng(seed);
        const LassoResult r = lasso_cv(dataset(std::move(X), std::move(y)), {}, folds, rng);
        py::dict out;
        out["columns"] = r.subset.columns();
        out["beta"] = r.beta;
        out["lambda"] = r.lambda;
        out["cv_errors"] = r.cv_errors;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("folds") = 10, py::arg("seed") = 0);
  m.def(
      "fp_fn",
      [](std::uint64_t selected, std::uint64_t truth, int p) {
        const FpFn r = fp_fn(SubsetIndex(selected, p), SubsetIndex(truth, p));
        return py::make_tuple(r.fp, r.fn);
      },
      py::arg("selected"), py::arg("truth"), py::arg("p"));
  m.def("rte", &rte, py::arg("beta_hat"), py::arg("beta_star"), py::arg("sigma"), py::arg("sigma2"));

  // datagen
  m.def(
      "gen_linear",
      [](int n, int n_test, int p, int s, double rho, double snr, const std::string& sparsity, std::uint64_t seed) {
        SimScenario scenario;
        scenario.n = n;
        scenario.n_test = n_test;
        scenario.p = p;
        scenario.s = s;
        scenario.rho = rho;
        scenario.snr = snr;
        scenario.sparsity = parse_sparsity(sparsity);
        scenario.seed = seed;
        const SyntheticData d = gen_linear(scenario);
        py::dict out;
        out["X"] = d.train.X;
        out["y"] = d.train.y;
        out["X_test"] = d.test.X;
        out["y_test"] = d.test.y;
        out["beta_star"] = d.beta_star;
        out["sigma"] = d.sigma;
        out["sigma2"] = d.sigma2;
        out["truth"] = d.truth().value();
        return out;
      },
      py::arg("n") = 100, py::arg("n_test") = 100, py::arg("p") = 10, py::arg("s") = 5, py::arg("rho") = 0.25,
      py::arg("snr") = 1.0, py::arg("sparsity") = "strong", py::arg("seed") = 0);
}
