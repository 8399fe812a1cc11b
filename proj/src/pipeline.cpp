#include "nugap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nugap/random.hpp"
#include "nugap/state_space.hpp"
#include "nugap/svg.hpp"

namespace nugap::pipeline {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json omega_json(double w) { return io::number(w); }

std::vector<std::string> member_ids(const RunReport& r, const std::vector<std::size_t>& members) {
  std::vector<std::string> ids;
  for (std::size_t i : members) ids.push_back(r.systems.ids[i]);
  return ids;
}

ClusterReport process_cluster(const PipelineConfig& cfg, RunReport& report, std::size_t node, int depth) {
  ClusterReport cr;
  cr.node = node;
  cr.depth = depth;
  cr.members = report.dendrogram.members(node);
  const auto& D = report.distances.matrix;
  for (std::size_t a : cr.members) {
    for (std::size_t b : cr.members) cr.diameter = std::max(cr.diameter, D(a, b));
  }

  std::vector<lti::RationalTF> systems;
  for (std::size_t i : cr.members) systems.push_back(report.systems.systems[i]);
  try {
    cr.prototype = proto::prototype(systems, D.subset(cr.members), cfg.prototype_config());
  } catch (const std::exception& e) {
    cr.status = std::string("prototype failed: ") + e.what();
    return cr;
  }
  if (!cr.prototype->certified) {
    cr.status = "uncertified prototype";
    return cr;
  }
  try {
    cr.controller = control::synthesize(cr.prototype->G_proto, cfg.gamma_rel, cfg.convention, cfg.grid());
  } catch (const std::exception& e) {
    cr.status = std::string("synthesis failed: ") + e.what();
    return cr;
  }
  cr.controller->member_reports =
      control::verify_cluster(cr.controller->Gc, cr.prototype->G_proto, systems, member_ids(report, cr.members),
                              cr.controller->b_achieved, cfg.convention, cfg.grid());
  bool all_ok = true;
  for (const auto& m : cr.controller->member_reports) {
    if (m.margin_ok && !m.internally_stable) ++report.theorem_violations;
    all_ok = all_ok && m.margin_ok && m.internally_stable;
  }
  cr.accepted = all_ok;
  cr.status = all_ok ? "accepted" : "members outside margin";
  return cr;
}

json cluster_summary(const RunReport& r, const ClusterReport& c, std::size_t index) {
  json j;
  j["index"] = index;
  j["node"] = c.node;
  j["depth"] = c.depth;
  j["members"] = member_ids(r, c.members);
  j["size"] = c.members.size();
  j["diameter"] = c.diameter;
  j["accepted"] = c.accepted;
  j["status"] = c.status;
  return j;
}

}  // namespace

void PipelineConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  if (!(cut_height > 0.0 && cut_height <= 1.0)) throw std::invalid_argument("cut_height must lie in (0, 1]");
  positive(grid_min, "grid_min");
  positive(grid_max, "grid_max");
  if (!(grid_min < grid_max)) throw std::invalid_argument("grid_min must be below grid_max");
  if (grid_points < 2) throw std::invalid_argument("grid_points must be at least 2");
  if (!(gamma_rel >= 1.0)) throw std::invalid_argument("gamma_rel must be >= 1");
  if (k_max < 1) throw std::invalid_argument("k_max must be positive");
  positive(rho0_factor, "rho0_factor");
  positive(improvement_tol, "improvement_tol");
  if (max_outer < 1) throw std::invalid_argument("max_outer must be positive");
  if (max_order < 1) throw std::invalid_argument("max_order must be positive");
  positive(t_end, "t_end");
  positive(dt, "dt");
  if (dt > t_end) throw std::invalid_argument("dt must not exceed t_end");
  if (tsne_iterations < 1) throw std::invalid_argument("tsne_iterations must be positive");
}

lti::FrequencyGrid PipelineConfig::grid() const { return lti::FrequencyGrid::log_spaced(grid_min, grid_max, grid_points); }

proto::PrototypeConfig PipelineConfig::prototype_config() const {
  proto::PrototypeConfig p;
  p.k_max = k_max;
  p.rho0_factor = rho0_factor;
  p.improvement_tol = improvement_tol;
  p.max_outer = max_outer;
  p.max_order = max_order;
  p.grid = grid();
  return p;
}

json PipelineConfig::to_json() const {
  return {{"cut_height", cut_height},
          {"grid_min", grid_min},
          {"grid_max", grid_max},
          {"grid_points", grid_points},
          {"gamma_rel", gamma_rel},
          {"k_max", k_max},
          {"rho0_factor", rho0_factor},
          {"improvement_tol", improvement_tol},
          {"max_outer", max_outer},
          {"max_order", max_order},
          {"seed", seed},
          {"t_end", t_end},
          {"dt", dt},
          {"tsne_iterations", tsne_iterations},
          {"convention", control::to_string(convention)}};
}

RunReport run_pipeline(const PipelineConfig& cfg, const io::SystemSet& systems) {
  cfg.validate();
  if (systems.systems.size() < 2) throw std::invalid_argument("the pipeline needs at least two systems");
  if (systems.ids.size() != systems.systems.size()) throw std::invalid_argument("id count mismatch");
  RunReport report;
  report.systems = systems;
  const lti::FrequencyGrid grid = cfg.grid();

  auto t0 = Clock::now();
  report.distances = metric::distance_matrix(systems.systems, systems.ids, grid, cfg.workers);
  for (const auto& w : report.distances.warnings) {
    report.warnings.push_back(systems.ids[w.i] + "/" + systems.ids[w.j] + ": " + w.message);
  }
  report.timings.emplace_back("distances", seconds_since(t0));

  t0 = Clock::now();
  report.dendrogram = cluster::complete_linkage(report.distances.matrix);
  report.initial_cut = cluster::cut(report.dendrogram, cfg.cut_height);
  report.timings.emplace_back("clustering", seconds_since(t0));

  t0 = Clock::now();
  std::deque<std::pair<std::size_t, int>> queue;
  for (std::size_t node : report.initial_cut.nodes) queue.emplace_back(node, 0);
  while (!queue.empty()) {
    const auto [node, depth] = queue.front();
    queue.pop_front();
    ClusterReport cr = process_cluster(cfg, report, node, depth);
    if (cr.accepted) {
      report.clusters.push_back(std::move(cr));
    } else if (!report.dendrogram.is_leaf(node)) {
      const auto [a, b] = report.dendrogram.children(node);
      queue.emplace_back(a, depth + 1);
      queue.emplace_back(b, depth + 1);
      report.rejected.push_back(std::move(cr));
    } else {
      ++report.failures;
      report.warnings.push_back("cluster " + systems.ids[node] + " failed: " + cr.status);
      report.clusters.push_back(std::move(cr));
    }
  }
  auto by_first = [](const ClusterReport& a, const ClusterReport& b) { return a.members.front() < b.members.front(); };
  std::sort(report.clusters.begin(), report.clusters.end(), by_first);
  report.timings.emplace_back("prototypes and controllers", seconds_since(t0));

  t0 = Clock::now();
  std::vector<lti::RationalTF> all = systems.systems;
  std::vector<std::string> labels = systems.ids;
  for (std::size_t k = 0; k < report.clusters.size(); ++k) {
    if (!report.clusters[k].prototype) continue;
    all.push_back(report.clusters[k].prototype->G_proto);
    labels.push_back("P" + std::to_string(k));
  }
  const std::size_t n = systems.systems.size();
  metric::DistanceMatrix E(all.size(), labels);
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      E.set(i, j, j < n ? report.distances.matrix(i, j) : metric::nu_gap(all[i], all[j], grid));
    }
  }
  if (all.size() >= 3) {
    embed::TsneConfig tc;
    tc.seed = Rng::derive_seed(cfg.seed, "tsne");
    tc.iterations = cfg.tsne_iterations;
    report.embedding = embed::tsne(E, tc);
  }
  report.embedding_distances = std::move(E);
  report.timings.emplace_back("embedding", seconds_since(t0));
  return report;
}

StepTable open_loop_steps(const io::SystemSet& systems, double t_end, double dt) {
  StepTable table;
  table.ids = systems.ids;
  for (const auto& g : systems.systems) {
    const lti::RationalTF row[] = {g};
    const auto r = lti::step_response(lti::tf_to_ss(row), t_end, dt);
    if (table.t.empty()) table.t = r.t;
    table.y.push_back(r.y);
  }
  return table;
}

StepTable closed_loop_steps(const RunReport& report, const PipelineConfig& cfg) {
  StepTable table;
  const std::size_t n = report.systems.systems.size();
  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  for (std::size_t k = 0; k <= steps; ++k) table.t.push_back(static_cast<double>(k) * cfg.dt);
  table.ids = report.systems.ids;
  table.y.assign(n, std::vector<double>(table.t.size(), std::numeric_limits<double>::quiet_NaN()));
  for (const auto& c : report.clusters) {
    if (!c.controller) continue;
    for (std::size_t i : c.members) {
      try {
        const lti::RationalTF row[] = {control::closed_loop(report.systems.systems[i], c.controller->Gc, cfg.convention)};
        table.y[i] = lti::step_response(lti::tf_to_ss(row), cfg.t_end, cfg.dt).y;
      } catch (const std::exception&) {
        // ill-posed loops keep their NaN column
      }
    }
  }
  return table;
}

std::string kappa_csv(const RunReport& report, const ClusterReport& c, const lti::FrequencyGrid& grid) {
  std::vector<std::string> header{"omega"};
  for (const char* tag : {"init:", "final:"}) {
    for (std::size_t i : c.members) header.push_back(tag + report.systems.ids[i]);
  }
  std::vector<std::vector<double>> rows;
  if (c.prototype) {
    for (double w : grid.omegas) {
      std::vector<double> row{w};
      for (const auto* g : {&c.prototype->G_init, &c.prototype->G_proto}) {
        for (std::size_t i : c.members) row.push_back(metric::pointwise_kappa(*g, report.systems.systems[i], w));
      }
      rows.push_back(std::move(row));
    }
  }
  return io::csv(header, rows);
}

json dendrogram_json(const RunReport& r) {
  json merges = json::array();
  for (const auto& m : r.dendrogram.merges) merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"id", m.id}});
  return {{"labels", r.systems.ids},
          {"merges", merges},
          {"cut_height", r.initial_cut.cut_height},
          {"initial_labels", r.initial_cut.labels},
          {"initial_nodes", r.initial_cut.nodes}};
}

json clusters_json(const RunReport& r) {
  json fin = json::array(), rej = json::array();
  for (std::size_t k = 0; k < r.clusters.size(); ++k) fin.push_back(cluster_summary(r, r.clusters[k], k));
  for (std::size_t k = 0; k < r.rejected.size(); ++k) rej.push_back(cluster_summary(r, r.rejected[k], k));
  return {{"final", fin}, {"rejected", rej}};
}

json prototype_to_json(const proto::PrototypeResult& p, const std::vector<std::string>& ids) {
  json trace = json::array();
  for (const auto& t : p.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"omega_c", t.omega_c ? omega_json(*t.omega_c) : json(nullptr)},
                     {"max_distance", t.max_distance}});
  }
  json dist = json::object();
  for (std::size_t i = 0; i < p.member_distances.size() && i < ids.size(); ++i) dist[ids[i]] = p.member_distances[i];
  return {{"prototype", io::tf_to_json(p.G_proto)},
          {"initial", io::tf_to_json(p.G_init)},
          {"initial_member", p.init_index < ids.size() ? json(ids[p.init_index]) : json(p.init_index)},
          {"trace", trace},
          {"max_distance", p.max_distance},
          {"b_max", p.b_max_proto},
          {"certified", p.certified},
          {"member_distances", dist},
          {"stop_reason", p.stop_reason}};
}

json prototypes_json(const RunReport& r) {
  json out = json::array();
  for (std::size_t k = 0; k < r.clusters.size(); ++k) {
    const auto& c = r.clusters[k];
    if (!c.prototype) continue;
    json j = prototype_to_json(*c.prototype, member_ids(r, c.members));
    j["cluster"] = k;
    out.push_back(std::move(j));
  }
  return out;
}

json controller_to_json(const control::ControllerResult& c) {
  json members = json::array();
  for (const auto& m : c.member_reports) {
    members.push_back({{"id", m.id},
                       {"nu_gap", m.nu_gap},
                       {"margin_ok", m.margin_ok},
                       {"internally_stable", m.internally_stable}});
  }
  return {{"controller", io::tf_to_json(c.Gc)},
          {"b_achieved", c.b_achieved},
          {"b_max", c.b_max_plant},
          {"gamma_rel", c.gamma_rel},
          {"convention", control::to_string(c.convention)},
          {"members", members}};
}

json controllers_json(const RunReport& r) {
  json out = json::array();
  for (std::size_t k = 0; k < r.clusters.size(); ++k) {
    if (!r.clusters[k].controller) continue;
    json j = controller_to_json(*r.clusters[k].controller);
    j["cluster"] = k;
    out.push_back(std::move(j));
  }
  return out;
}

json report_json(const RunReport& r, const PipelineConfig& cfg) {
  json clusters = json::array();
  for (std::size_t k = 0; k < r.clusters.size(); ++k) {
    const auto& c = r.clusters[k];
    json j = cluster_summary(r, c, k);
    if (c.prototype) {
      j["max_distance_initial"] = c.prototype->trace.front().max_distance;
      j["max_distance_final"] = c.prototype->max_distance;
      j["b_max_prototype"] = c.prototype->b_max_proto;
      j["prototype_order"] = c.prototype->G_proto.order();
      j["certified"] = c.prototype->certified;
    }
    if (c.controller) {
      j["b_achieved"] = c.controller->b_achieved;
      j["controller_order"] = c.controller->Gc.order();
      bool ok = true, stable = true;
      for (const auto& m : c.controller->member_reports) {
        ok = ok && m.margin_ok;
        stable = stable && m.internally_stable;
      }
      j["all_margin_ok"] = ok;
      j["all_internally_stable"] = stable;
    }
    clusters.push_back(std::move(j));
  }
  json counts = {{"systems", r.systems.systems.size()},
                 {"initial_clusters", r.initial_cut.k},
                 {"final_clusters", r.clusters.size()},
                 {"rejected_clusters", r.rejected.size()},
                 {"failures", r.failures},
                 {"theorem_violations", r.theorem_violations},
                 {"distance_warnings", r.distances.warnings.size()}};
  json out = {{"config", cfg.to_json()}, {"counts", counts}, {"warnings", r.warnings}, {"clusters", clusters}};
  if (r.embedding) {
    out["embedding"] = {{"iterations", r.embedding->iterations},
                        {"best_iteration", r.embedding->best_iteration},
                        {"kl_initial", r.embedding->kl_trace.front()},
                        {"kl_best", r.embedding->kl_trace[static_cast<std::size_t>(r.embedding->best_iteration)]}};
  }
  return out;
}

std::string step_csv(const StepTable& table) {
  std::vector<std::string> header{"t"};
  header.insert(header.end(), table.ids.begin(), table.ids.end());
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < table.t.size(); ++k) {
    std::vector<double> row{table.t[k]};
    for (const auto& y : table.y) row.push_back(k < y.size() ? y[k] : std::numeric_limits<double>::quiet_NaN());
    rows.push_back(std::move(row));
  }
  return io::csv(header, rows);
}

std::string tsne_csv(const RunReport& r) {
  std::ostringstream os;
  os << "id,z1,z2,cluster\n";
  if (!r.embedding || !r.embedding_distances) return os.str();
  std::vector<long> label(r.embedding_distances->size(), -1);
  std::size_t proto = r.systems.systems.size();
  for (std::size_t k = 0; k < r.clusters.size(); ++k) {
    for (std::size_t i : r.clusters[k].members) label[i] = static_cast<long>(k);
    if (r.clusters[k].prototype) label[proto++] = static_cast<long>(k);
  }
  const auto& Z = r.embedding->coords;
  for (std::size_t i = 0; i < label.size(); ++i) {
    os << r.embedding_distances->labels()[i] << ',' << io::format9(Z(static_cast<Eigen::Index>(i), 0)) << ','
       << io::format9(Z(static_cast<Eigen::Index>(i), 1)) << ',' << label[i] << '\n';
  }
  return os.str();
}

std::string tsne_kl_csv(const embed::EmbeddingResult& e) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < e.kl_trace.size(); ++i) rows.push_back({static_cast<double>(i), e.kl_trace[i]});
  return io::csv({"iteration", "kl"}, rows);
}

void write_artifacts(const RunReport& report, const PipelineConfig& cfg, const std::filesystem::path& out) {
  const lti::FrequencyGrid grid = cfg.grid();
  io::write_json(out / "systems.json", io::systems_to_json(report.systems));
  io::write_text(out / "distances.csv", report.distances.matrix.to_csv());
  io::write_json(out / "dendrogram.json", dendrogram_json(report));
  io::write_text(out / "dendrogram.svg",
                 svg::dendrogram(report.dendrogram, report.systems.ids, cfg.cut_height, "Complete linkage dendrogram"));
  io::write_json(out / "clusters.json", clusters_json(report));
  io::write_json(out / "prototypes.json", prototypes_json(report));
  io::write_json(out / "controllers.json", controllers_json(report));
  io::write_json(out / "report.json", report_json(report, cfg));

  for (std::size_t k = 0; k < report.clusters.size(); ++k) {
    const auto& c = report.clusters[k];
    if (!c.prototype) continue;
    const std::string stem = "kappa_cluster" + std::to_string(k);
    io::write_text(out / (stem + ".csv"), kappa_csv(report, c, grid));
    std::vector<svg::Series> series;
    for (const auto* g : {&c.prototype->G_init, &c.prototype->G_proto}) {
      const bool initial = g == &c.prototype->G_init;
      for (std::size_t i : c.members) {
        svg::Series s{(initial ? "init " : "final ") + report.systems.ids[i], grid.omegas, {}, initial};
        for (double w : grid.omegas) s.y.push_back(metric::pointwise_kappa(*g, report.systems.systems[i], w));
        series.push_back(std::move(s));
      }
    }
    io::write_text(out / (stem + ".svg"),
                   svg::line_plot(series, {"Pointwise chordal distance to the prototype, cluster " + std::to_string(k),
                                           "omega [rad/s]", "kappa", true, 0.0}));
  }

  auto step_plot = [&](const StepTable& t, const std::string& title) {
    std::vector<svg::Series> series;
    for (std::size_t i = 0; i < t.ids.size(); ++i) series.push_back({t.ids[i], t.t, t.y[i], false});
    return svg::line_plot(series, {title, "t [s]", "y", false, 10.0});
  };
  const StepTable open = open_loop_steps(report.systems, cfg.t_end, cfg.dt);
  io::write_text(out / "step_open.csv", step_csv(open));
  io::write_text(out / "step_open.svg", step_plot(open, "Open-loop step responses"));
  const StepTable closed = closed_loop_steps(report, cfg);
  io::write_text(out / "step_closed.csv", step_csv(closed));
  io::write_text(out / "step_closed.svg", step_plot(closed, "Closed-loop step responses"));

  io::write_text(out / "tsne.csv", tsne_csv(report));
  if (report.embedding) {
    io::write_text(out / "tsne_kl.csv", tsne_kl_csv(*report.embedding));
    std::vector<svg::ScatterPoint> pts;
    std::size_t proto = report.systems.systems.size();
    std::vector<int> group(report.embedding_distances->size(), -1);
    for (std::size_t k = 0; k < report.clusters.size(); ++k) {
      for (std::size_t i : report.clusters[k].members) group[i] = static_cast<int>(k);
      if (report.clusters[k].prototype) group[proto++] = static_cast<int>(k);
    }
    const auto& Z = report.embedding->coords;
    for (std::size_t i = 0; i < group.size(); ++i) {
      pts.push_back({Z(static_cast<Eigen::Index>(i), 0), Z(static_cast<Eigen::Index>(i), 1),
                     report.embedding_distances->labels()[i], group[i], i >= report.systems.systems.size()});
    }
    io::write_text(out / "tsne.svg", svg::scatter(pts, {"t-SNE embedding of the nu-gap distances", "z1", "z2", false, 0.0}));
  } else {
    io::write_text(out / "tsne_kl.csv", "iteration,kl\n");
  }

  std::ostringstream timing;
  for (const auto& [stage, s] : report.timings) timing << stage << ": " << s << " s\n";
  io::write_text(out / "timings.txt", timing.str());
}

}  // namespace nugap::pipeline
