#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nugap/cluster.hpp"
#include "nugap/controller.hpp"
#include "nugap/dataset.hpp"
#include "nugap/io.hpp"
#include "nugap/metric.hpp"
#include "nugap/prototype.hpp"
#include "nugap/tsne.hpp"

namespace nugap::pipeline {

struct PipelineConfig {
  double cut_height = 0.6;
  double grid_min = 1e-4;
  double grid_max = 1e4;
  int grid_points = 600;
  double gamma_rel = 1.05;
  int k_max = 20;
  double rho0_factor = 10.0;
  double improvement_tol = 1e-4;
  int max_outer = 50;
  int max_order = 30;
  std::uint64_t seed = 1;
  std::size_t n = 80;
  double t_end = 20.0;
  double dt = 0.01;
  int tsne_iterations = 1000;
  control::FeedbackConvention convention = control::FeedbackConvention::positive;
  /// Worker threads for the distance matrix (0 = hardware concurrency).
  unsigned workers = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  lti::FrequencyGrid grid() const;
  proto::PrototypeConfig prototype_config() const;
  nlohmann::json to_json() const;
};

/// One dendrogram node processed as a cluster.
struct ClusterReport {
  /// Dendrogram node and its leaves (indices into the system list).
  std::size_t node = 0;
  std::vector<std::size_t> members;
  /// Number of re-splits between the initial cut and this node.
  int depth = 0;
  double diameter = 0.0;
  std::optional<proto::PrototypeResult> prototype;
  std::optional<control::ControllerResult> controller;
  /// Certified prototype, controller synthesized and every member within
  /// the achieved margin.
  bool accepted = false;
  std::string status;
};

struct RunReport {
  io::SystemSet systems;
  metric::DistanceReport distances;
  cluster::Dendrogram dendrogram;
  cluster::ClusterAssignment initial_cut;
  /// Accepted clusters (and unsplittable failures), ordered by smallest member.
  std::vector<ClusterReport> clusters;
  /// Clusters that were rejected and split into their dendrogram children.
  std::vector<ClusterReport> rejected;
  std::optional<embed::EmbeddingResult> embedding;
  /// Distances over systems followed by one prototype per final cluster.
  std::optional<metric::DistanceMatrix> embedding_distances;
  std::vector<std::string> warnings;
  /// Members with margin_ok but not internally stable.
  std::size_t theorem_violations = 0;
  std::size_t failures = 0;
  /// Wall-clock seconds per stage; kept out of the deterministic artifacts.
  std::vector<std::pair<std::string, double>> timings;
};

/// distances, complete linkage, cut, then per cluster prototype, controller
/// and member verification. Rejected clusters are replaced by the two
/// clusters under their dendrogram node until every cluster is accepted or
/// a singleton fails. Finishes with the embedding of systems and prototypes.
RunReport run_pipeline(const PipelineConfig& cfg, const io::SystemSet& systems);

/// Step responses of every system, open loop, as (t, y per system).
struct StepTable {
  std::vector<double> t;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> y;
};

StepTable open_loop_steps(const io::SystemSet& systems, double t_end, double dt);
/// Closed loops of each system with the controller of its final cluster.
StepTable closed_loop_steps(const RunReport& report, const PipelineConfig& cfg);

/// kappa(G(jw), member(jw)) for the initial and the final prototype of a
/// cluster on the grid, columns "omega", "init:<id>"..., "final:<id>"...
std::string kappa_csv(const RunReport& report, const ClusterReport& c, const lti::FrequencyGrid& grid);

// JSON/CSV documents written by write_artifacts.
nlohmann::json dendrogram_json(const RunReport& r);
nlohmann::json clusters_json(const RunReport& r);
nlohmann::json prototypes_json(const RunReport& r);
nlohmann::json controllers_json(const RunReport& r);
nlohmann::json report_json(const RunReport& r, const PipelineConfig& cfg);
nlohmann::json prototype_to_json(const proto::PrototypeResult& p, const std::vector<std::string>& ids);
nlohmann::json controller_to_json(const control::ControllerResult& c);
std::string step_csv(const StepTable& table);
std::string tsne_csv(const RunReport& r);
std::string tsne_kl_csv(const embed::EmbeddingResult& e);

/// Writes every artifact (JSON, CSV and SVG renderings) into out_dir.
/// Timings go to timings.txt, the only non-deterministic file.
void write_artifacts(const RunReport& report, const PipelineConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace nugap::pipeline
