#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gradsurg/config.hpp"
#include "gradsurg/losses.hpp"
#include "gradsurg/runner.hpp"
#include "gradsurg/training.hpp"
#include "gradsurg/verify.hpp"

namespace py = pybind11;
using namespace gradsurg;

PYBIND11_MODULE(gradsurg, m) {
  m.doc() = "Direct gradient surgery for metric-learning embeddings";

  py::register_exception<Error>(m, "GradsurgError");

  py::class_<Embedding>(m, "Embedding")
      .def_static("normalize", &Embedding::normalize)
      .def_property_readonly("coords", &Embedding::coords)
      .def_property_readonly("dim", &Embedding::dim);
  m.def("normalize", [](const Vec& v) { return Embedding::normalize(v); });

  py::class_<SimilarityPair>(m, "SimilarityPair")
      .def(py::init([](double s_ap, double s_an) { return make_similarity_pair(s_ap, s_an); }),
           py::arg("s_ap"), py::arg("s_an"))
      .def_readonly("s_ap", &SimilarityPair::s_ap)
      .def_readonly("s_an", &SimilarityPair::s_an);

  m.def("cosine_similarity", &cosine_similarity);
  m.def("euclidean_distance", &euclidean_distance);
  m.def("tangent_project", &tangent_project);

  py::enum_<Metric>(m, "Metric")
      .value("euclidean", Metric::euclidean)
      .value("cosine", Metric::cosine);
  py::enum_<PairRole>(m, "PairRole")
      .value("positive", PairRole::positive)
      .value("negative", PairRole::negative);
  m.def("effective_strength", &effective_strength);
  m.def("parallel_length", &parallel_length);

  py::class_<LossParams>(m, "LossParams")
      .def(py::init<>())
      .def_readwrite("margin", &LossParams::margin)
      .def_readwrite("tau", &LossParams::tau);
  py::enum_<LossKind>(m, "LossKind")
      .value("euclidean", LossKind::euclidean)
      .value("cosine", LossKind::cosine);
  py::enum_<TripletRole>(m, "TripletRole")
      .value("anchor", TripletRole::anchor)
      .value("positive", TripletRole::positive)
      .value("negative", TripletRole::negative);
  m.def("triplet_loss_euclidean", &triplet_loss_euclidean);
  m.def("triplet_loss_cosine", &triplet_loss_cosine);
  m.def("numeric_gradient", &numeric_gradient, py::arg("kind"), py::arg("params"), py::arg("f_a"),
        py::arg("f_p"), py::arg("f_n"), py::arg("wrt"), py::arg("h") = 1e-5);

  py::enum_<DirectionKind>(m, "DirectionKind")
      .value("euclidean", DirectionKind::euclidean)
      .value("cosine", DirectionKind::cosine)
      .value("euclidean_orthogonal", DirectionKind::euclidean_orthogonal)
      .value("cosine_orthogonal", DirectionKind::cosine_orthogonal);
  py::enum_<PairWeightKind>(m, "PairWeightKind")
      .value("constant", PairWeightKind::constant)
      .value("euclidean", PairWeightKind::euclidean)
      .value("linear", PairWeightKind::linear)
      .value("sigmoid", PairWeightKind::sigmoid)
      .value("sigmoid_ms", PairWeightKind::sigmoid_ms)
      .value("linear_ms", PairWeightKind::linear_ms);
  py::enum_<TripletWeightKind>(m, "TripletWeightKind")
      .value("constant", TripletWeightKind::constant)
      .value("cosine", TripletWeightKind::cosine)
      .value("circle", TripletWeightKind::circle);
  py::enum_<MaskKind>(m, "MaskKind")
      .value("none", MaskKind::none)
      .value("sc1", MaskKind::sc1)
      .value("sc2", MaskKind::sc2);
  py::enum_<RelativeForm>(m, "RelativeForm")
      .value("sigmoid", RelativeForm::sigmoid)
      .value("linear", RelativeForm::linear);
  py::enum_<MaskAction>(m, "MaskAction")
      .value("keep", MaskAction::keep)
      .value("zero", MaskAction::zero);

  py::class_<SurgeryConfig>(m, "SurgeryConfig")
      .def(py::init<>())
      .def_readwrite("direction", &SurgeryConfig::direction)
      .def_readwrite("pair_weight", &SurgeryConfig::pair_weight)
      .def_readwrite("triplet_weight", &SurgeryConfig::triplet_weight)
      .def_readwrite("mask", &SurgeryConfig::mask)
      .def_readwrite("tau", &SurgeryConfig::tau)
      .def_readwrite("alpha", &SurgeryConfig::alpha)
      .def_readwrite("beta", &SurgeryConfig::beta)
      .def_readwrite("lambda_", &SurgeryConfig::lambda)
      .def_readwrite("margin", &SurgeryConfig::margin);

  py::class_<DirectionSet>(m, "DirectionSet")
      .def_readonly("e_p", &DirectionSet::e_p)
      .def_readonly("e_n", &DirectionSet::e_n)
      .def_readonly("e_ap", &DirectionSet::e_ap)
      .def_readonly("e_an", &DirectionSet::e_an);
  py::class_<PairWeights>(m, "PairWeights")
      .def_readonly("p_pos", &PairWeights::p_pos)
      .def_readonly("p_neg", &PairWeights::p_neg);
  py::class_<RelativeStats>(m, "RelativeStats")
      .def(py::init<>())
      .def_readwrite("m_pos", &RelativeStats::m_pos)
      .def_readwrite("m_neg", &RelativeStats::m_neg)
      .def_readwrite("form", &RelativeStats::form);
  py::class_<TripletUpdate>(m, "TripletUpdate")
      .def_readonly("g_a", &TripletUpdate::g_a)
      .def_readonly("g_p", &TripletUpdate::g_p)
      .def_readonly("g_n", &TripletUpdate::g_n);

  m.def("unit_directions", &unit_directions, py::arg("kind"), py::arg("f_a"), py::arg("f_p"),
        py::arg("f_n"), py::arg("orthogonalize_anchor") = true);
  m.def("relative_stats", &relative_stats);
  m.def("pair_weights", &pair_weights);
  m.def("triplet_weight", &triplet_weight);
  m.def("positive_mask", &positive_mask);
  m.def("empty_relative_stats", &empty_relative_stats);
  m.def("compose",
        py::overload_cast<const SurgeryConfig&, const Embedding&, const Embedding&,
                          const Embedding&, const RelativeStats&>(&compose));
  m.def("compose", py::overload_cast<const SurgeryConfig&, const Embedding&, const Embedding&,
                                     const Embedding&>(&compose));
  m.def("best_combination_preset", &best_combination_preset);

  py::class_<BatchSpec>(m, "BatchSpec")
      .def(py::init<>())
      .def_readwrite("classes_per_batch", &BatchSpec::classes_per_batch)
      .def_readwrite("samples_per_class", &BatchSpec::samples_per_class);
  py::class_<TripletIndices>(m, "TripletIndices")
      .def_readonly("anchor", &TripletIndices::anchor)
      .def_readonly("positive", &TripletIndices::positive)
      .def_readonly("negative", &TripletIndices::negative);
  py::class_<RelativeSets>(m, "RelativeSets")
      .def_readonly("set_p", &RelativeSets::set_p)
      .def_readonly("set_n", &RelativeSets::set_n);
  py::class_<MiningContext>(m, "MiningContext")
      .def_readonly("anchor_index", &MiningContext::anchor_index)
      .def_readonly("positive_index", &MiningContext::positive_index)
      .def_readonly("negative_index", &MiningContext::negative_index)
      .def_readonly("sims", &MiningContext::sims)
      .def_readonly("relative_pos", &MiningContext::relative_pos)
      .def_readonly("relative_neg", &MiningContext::relative_neg)
      .def_readonly("set_p", &MiningContext::set_p)
      .def_readonly("set_n", &MiningContext::set_n);
  m.def("make_batch", &make_batch);
  m.def("ephn_triplets", &ephn_triplets);
  m.def("relative_sets", &relative_sets);
  m.def("mine_batch", &mine_batch);

  py::class_<RecallReport>(m, "RecallReport")
      .def_readonly("ks", &RecallReport::ks)
      .def_readonly("recall", &RecallReport::recall);
  py::class_<DiagramRow>(m, "DiagramRow")
      .def_readonly("anchor_id", &DiagramRow::anchor_id)
      .def_readonly("s_np", &DiagramRow::s_np)
      .def_readonly("s_nn", &DiagramRow::s_nn);
  m.def("recall_at_k", &recall_at_k);
  m.def("triplet_diagram", &triplet_diagram);

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("num_classes", &SyntheticSpec::num_classes)
      .def_readwrite("samples_per_class", &SyntheticSpec::samples_per_class)
      .def_readwrite("input_dim", &SyntheticSpec::input_dim)
      .def_readwrite("noise_sigma", &SyntheticSpec::noise_sigma)
      .def_readwrite("holdout_classes", &SyntheticSpec::holdout_classes)
      .def_readwrite("seed", &SyntheticSpec::seed);
  py::class_<Dataset>(m, "Dataset")
      .def_readonly("inputs", &Dataset::inputs)
      .def_readonly("labels", &Dataset::labels)
      .def("split_ids", &Dataset::split_ids)
      .def("__len__", &Dataset::size);
  m.def("generate_dataset", &generate_dataset);

  py::enum_<EncoderKind>(m, "EncoderKind")
      .value("table", EncoderKind::table)
      .value("linear", EncoderKind::linear);
  py::class_<EncoderSpec>(m, "EncoderSpec")
      .def(py::init<>())
      .def_readwrite("kind", &EncoderSpec::kind)
      .def_readwrite("embed_dim", &EncoderSpec::embed_dim);
  py::class_<Encoder>(m, "Encoder")
      .def_static("init", &Encoder::init)
      .def("forward_one", &Encoder::forward_one)
      .def("forward", &Encoder::forward)
      .def("forward_all", &Encoder::forward_all)
      .def("apply_updates", &Encoder::apply_updates);

  py::enum_<Aggregate>(m, "Aggregate")
      .value("mean", Aggregate::mean)
      .value("sum", Aggregate::sum);
  py::class_<TrainParams>(m, "TrainParams")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainParams::epochs)
      .def_readwrite("batch", &TrainParams::batch)
      .def_readwrite("base_lr", &TrainParams::base_lr)
      .def_readwrite("lr_step_factor", &TrainParams::lr_step_factor)
      .def_readwrite("lr_milestone_frac", &TrainParams::lr_milestone_frac)
      .def_readwrite("seed", &TrainParams::seed)
      .def_readwrite("aggregate", &TrainParams::aggregate);
  m.def("lr_at", &lr_at);

  py::class_<EpochRecord>(m, "EpochRecord")
      .def_readonly("epoch", &EpochRecord::epoch)
      .def_readonly("lr", &EpochRecord::lr)
      .def_readonly("loss_proxy", &EpochRecord::loss_proxy)
      .def_readonly("mean_s_ap", &EpochRecord::mean_s_ap)
      .def_readonly("mean_s_an", &EpochRecord::mean_s_an)
      .def_readonly("recall_train", &EpochRecord::recall_train)
      .def_readonly("recall_holdout", &EpochRecord::recall_holdout);
  py::class_<TrainLog>(m, "TrainLog")
      .def_readonly("ks", &TrainLog::ks)
      .def_readonly("epochs", &TrainLog::epochs)
      .def("final_recall", &TrainLog::final_recall);
  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("log", &TrainResult::log)
      .def_readonly("encoder", &TrainResult::encoder)
      .def_readonly("dataset", &TrainResult::dataset);
  m.def("train", &train, py::arg("data_spec"), py::arg("encoder_spec"), py::arg("surgery"),
        py::arg("mining_epsilon"), py::arg("params"), py::arg("eval_ks"), py::arg("threads") = 1);
}
