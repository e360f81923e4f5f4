// Python bindings for the core operations: simulation, score fitting,
// calibration, set prediction and evaluation.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "confset/calibration.hpp"
#include "confset/dataset.hpp"
#include "confset/erm.hpp"
#include "confset/error.hpp"
#include "confset/gaussian_mixture.hpp"
#include "confset/learners.hpp"
#include "confset/loss.hpp"
#include "confset/pipeline.hpp"
#include "confset/serialization.hpp"
#include "confset/superlearner.hpp"

namespace py = pybind11;
using namespace confset;

namespace {

LabeledDataset make_dataset(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                            int class_count) {
  LabeledDataset data;
  data.features = features;
  data.labels = labels;
  data.class_count = class_count;
  data.validate();
  return data;
}

ScoreAlgorithm make_algorithm(const std::string& name, int k, const std::string& loss,
                              double clamp_bound, int max_iterations, double tolerance) {
  ScoreAlgorithm algorithm = ScoreAlgorithm::from_name(name);
  algorithm.k = k;
  algorithm.erm.loss = Loss::from_name(loss);
  algorithm.erm.clamp_bound = clamp_bound;
  algorithm.erm.max_iterations = max_iterations;
  algorithm.erm.relative_tolerance = tolerance;
  return algorithm;
}

}  // namespace

PYBIND11_MODULE(_confset, module) {
  module.doc() = "Set-valued multiclass classification with expected-size control";

  py::register_exception<ValidationError>(module, "ValidationError", PyExc_ValueError);

  py::class_<LabeledDataset>(module, "LabeledDataset")
      .def(py::init(&make_dataset), py::arg("features"), py::arg("labels"),
           py::arg("class_count"))
      .def_readonly("features", &LabeledDataset::features)
      .def_readonly("labels", &LabeledDataset::labels)
      .def_readonly("class_count", &LabeledDataset::class_count)
      .def("__len__", &LabeledDataset::n);

  py::class_<UnlabeledDataset>(module, "UnlabeledDataset")
      .def(py::init([](const Eigen::MatrixXd& features) {
             UnlabeledDataset data;
             data.features = features;
             return data;
           }),
           py::arg("features"))
      .def_readonly("features", &UnlabeledDataset::features)
      .def("__len__", &UnlabeledDataset::n);

  module.def("load_labeled_csv", &load_labeled_csv, py::arg("path"),
             py::arg("label_column") = "label", py::arg("class_count_override") = 0);
  module.def(
      "split_dataset",
      [](const LabeledDataset& data, double train, double calibrate, double test,
         std::uint64_t seed, bool stratified) {
        const SplitResult split =
            split_dataset(data, train, calibrate, test, RandomSeed{seed}, stratified);
        return py::make_tuple(split.train, split.calibrate, split.test);
      },
      py::arg("data"), py::arg("train_fraction"), py::arg("calibrate_fraction"),
      py::arg("test_fraction"), py::arg("seed"), py::arg("stratified") = false);

  py::class_<GaussianMixtureModel>(module, "GaussianMixtureModel")
      .def(py::init([](const Eigen::MatrixXd& means) {
             GaussianMixtureModel model;
             model.means = means;
             return model;
           }),
           py::arg("means"))
      .def_readonly("means", &GaussianMixtureModel::means)
      .def_property_readonly("class_count", &GaussianMixtureModel::class_count)
      .def_property_readonly("dimension", &GaussianMixtureModel::dimension);

  module.def(
      "uniform_means_model",
      [](int class_count, int dimension, double low, double high, std::uint64_t seed) {
        return uniform_means_model(class_count, dimension, low, high, RandomSeed{seed});
      },
      py::arg("class_count"), py::arg("dimension"), py::arg("low"), py::arg("high"),
      py::arg("seed"));
  module.def(
      "sample_mixture",
      [](const GaussianMixtureModel& model, int count, std::uint64_t seed) {
        return sample_mixture(model, count, RandomSeed{seed});
      },
      py::arg("model"), py::arg("count"), py::arg("seed"));
  module.def("posterior", &posterior, py::arg("model"), py::arg("x"));
  module.def("posterior_matrix", &posterior_matrix, py::arg("model"), py::arg("features"));
  module.def(
      "oracle_beta_set",
      [](const GaussianMixtureModel& model, const Eigen::VectorXd& x, double beta,
         int pool_size, std::uint64_t seed) {
        const EmpiricalG g = build_true_g(model, pool_size, RandomSeed{seed});
        return oracle_beta_set(model, g, beta, x).members;
      },
      py::arg("model"), py::arg("x"), py::arg("beta"), py::arg("pool_size") = 1000000,
      py::arg("seed") = 7);

  py::class_<Loss>(module, "Loss")
      .def_static("from_name", &Loss::from_name, py::arg("name"))
      .def("name", &Loss::name)
      .def("value", &Loss::value, py::arg("x"))
      .def("derivative", &Loss::derivative, py::arg("x"));
  module.def(
      "calibrated_threshold",
      [](const std::string& loss, double g_level) {
        return calibrated_threshold(Loss::from_name(loss), g_level).delta_star;
      },
      py::arg("loss"), py::arg("g_level"));

  py::class_<EmpiricalG>(module, "EmpiricalG")
      .def_property_readonly("pool_rows", &EmpiricalG::pool_rows)
      .def_property_readonly("class_count", &EmpiricalG::class_count)
      .def("g_value", &EmpiricalG::g_value, py::arg("t"))
      .def("g_inverse", &EmpiricalG::g_inverse, py::arg("beta"))
      .def("pool_information", &EmpiricalG::pool_information, py::arg("beta"));
  module.def(
      "build_empirical_g",
      [](const Eigen::MatrixXd& scores) {
        ScorePool pool;
        pool.scores = scores;
        return build_empirical_g(pool);
      },
      py::arg("scores"));

  py::class_<ScoreModel, std::unique_ptr<ScoreModel>>(module, "ScoreModel")
      .def_property_readonly("class_count", &ScoreModel::class_count)
      .def_property_readonly("dimension", &ScoreModel::dimension)
      .def_property_readonly("kind", &ScoreModel::kind)
      .def("scores", &ScoreModel::scores, py::arg("features"));

  module.def(
      "fit_erm",
      [](const LabeledDataset& data, const std::string& loss, double clamp_bound,
         int max_iterations, double tolerance) {
        ErmConfig config;
        config.loss = Loss::from_name(loss);
        config.clamp_bound = clamp_bound;
        config.max_iterations = max_iterations;
        config.relative_tolerance = tolerance;
        return std::unique_ptr<ScoreModel>(
            std::make_unique<AffineScoreModel>(fit_erm(data, config, RandomSeed{0})));
      },
      py::arg("data"), py::arg("loss") = "logistic", py::arg("clamp_bound") = 5.0,
      py::arg("max_iterations") = 10000, py::arg("tolerance") = 1e-8);
  module.def(
      "fit_learner",
      [](const LabeledDataset& data, const std::string& name, int k, const std::string& loss,
         double clamp_bound, int max_iterations, double tolerance) {
        return make_algorithm(name, k, loss, clamp_bound, max_iterations, tolerance).fit(data);
      },
      py::arg("data"), py::arg("name"), py::arg("k") = 11, py::arg("loss") = "logistic",
      py::arg("clamp_bound") = 5.0, py::arg("max_iterations") = 10000,
      py::arg("tolerance") = 1e-8);
  module.def(
      "fit_aggregated_model",
      [](const LabeledDataset& data, const std::vector<std::string>& learners, int folds,
         const std::string& loss, const std::string& weight_mode, int grid_resolution,
         std::uint64_t seed) {
        std::vector<ScoreAlgorithm> algorithms;
        for (const auto& name : learners) algorithms.push_back(ScoreAlgorithm::from_name(name));
        AggregationConfig config;
        config.folds = folds;
        config.loss = Loss::from_name(loss);
        config.grid_resolution = grid_resolution;
        if (weight_mode == "continuous") {
          config.mode = WeightMode::continuous;
        } else if (weight_mode == "grid") {
          config.mode = WeightMode::grid;
        } else {
          throw ValidationError("unknown weight mode '" + weight_mode + "'");
        }
        AggregationResult result =
            fit_aggregated_model(data, algorithms, config, RandomSeed{seed});
        std::unique_ptr<ScoreModel> model = std::move(result.model);
        return py::make_tuple(std::move(model), Eigen::VectorXd(result.weights.weights),
                              result.aggregate_cv_risk);
      },
      py::arg("data"), py::arg("learners"), py::arg("folds") = 5,
      py::arg("loss") = "boosting", py::arg("weight_mode") = "continuous",
      py::arg("grid_resolution") = 100, py::arg("seed") = 0);

  py::class_<ConfidenceSetPredictor>(module, "ConfidenceSetPredictor")
      .def_readonly("beta", &ConfidenceSetPredictor::beta)
      .def("predict_set",
           [](const ConfidenceSetPredictor& predictor, const Eigen::VectorXd& x) {
             return predict_set(predictor, x).members;
           })
      .def("predict_memberships",
           [](const ConfidenceSetPredictor& predictor, const Eigen::MatrixXd& features) {
             const auto memberships = predict_memberships(predictor, features);
             py::list sets;
             for (int i = 0; i < memberships.rows(); ++i) {
               py::list members;
               for (int k = 0; k < memberships.cols(); ++k) {
                 if (memberships(i, k)) members.append(k + 1);
               }
               sets.append(members);
             }
             return sets;
           });

  module.def(
      "calibrate",
      [](const ScoreModel& model, const Eigen::MatrixXd& pool_features, double beta, bool jitter,
         std::uint64_t jitter_salt) {
        UnlabeledDataset pool;
        pool.features = pool_features;
        return calibrate(model.clone(), pool, beta, jitter, jitter_salt);
      },
      py::arg("model"), py::arg("pool_features"), py::arg("beta"), py::arg("jitter") = false,
      py::arg("jitter_salt") = 0);

  py::class_<EvaluationReport>(module, "EvaluationReport")
      .def_readonly("risk", &EvaluationReport::risk)
      .def_readonly("information", &EvaluationReport::information)
      .def_readonly("beta_target", &EvaluationReport::beta_target)
      .def_readonly("n_test", &EvaluationReport::n_test)
      .def_readonly("empty_set_fraction", &EvaluationReport::empty_set_fraction)
      .def("to_csv", &EvaluationReport::to_csv)
      .def("to_text", &EvaluationReport::to_text);
  module.def("evaluate", &evaluate, py::arg("predictor"), py::arg("test"),
             py::arg("beta_sweep") = std::vector<double>{});

  module.def("save_score_model", &save_score_model, py::arg("model"), py::arg("path"));
  module.def("load_score_model", &load_score_model, py::arg("path"));
  module.def(
      "save_predictor",
      [](const ConfidenceSetPredictor& predictor, const std::string& path) {
        save_predictor(predictor, path);
      },
      py::arg("predictor"), py::arg("path"));
  module.def("load_predictor", &load_predictor, py::arg("path"));
}
