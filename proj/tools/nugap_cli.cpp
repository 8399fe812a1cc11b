#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nugap/chebyshev.hpp"
#include "nugap/cluster.hpp"
#include "nugap/controller.hpp"
#include "nugap/dataset.hpp"
#include "nugap/io.hpp"
#include "nugap/metric.hpp"
#include "nugap/pipeline.hpp"
#include "nugap/prototype.hpp"
#include "nugap/random.hpp"
#include "nugap/svg.hpp"
#include "nugap/tsne.hpp"

namespace fs = std::filesystem;
using namespace nugap;
using nlohmann::json;

namespace {

struct Options {
  std::string input;
  std::string out = "out";
  std::string controller;
  std::string prototype;
  pipeline::PipelineConfig cfg;
  bool negative = false;
};

io::SystemSet load_or_generate(const Options& o) {
  if (!o.input.empty()) return io::read_systems(o.input);
  const auto d = data::generate_dataset(o.cfg.seed, o.cfg.n);
  return {d.ids, d.systems};
}

io::SystemSet load(const Options& o) {
  if (o.input.empty()) throw io::InputError("--input is required");
  return io::read_systems(o.input);
}

lti::RationalTF load_single(const std::string& path, const char* what) {
  if (path.empty()) throw io::InputError(std::string("--") + what + " is required");
  const json j = io::read_json(path);
  if (j.is_array()) {
    const auto set = io::parse_systems(j);
    if (set.systems.empty()) throw io::InputError(path + ": empty system list");
    return set.systems.front();
  }
  // accepts plain {num, den} objects and entries of prototypes.json / controllers.json
  for (const char* key : {"prototype", "controller"}) {
    if (j.contains(key)) return io::tf_from_json(j.at(key));
  }
  return io::tf_from_json(j);
}

int cmd_generate(const Options& o) {
  const auto d = data::generate_dataset(o.cfg.seed, o.cfg.n);
  json out = io::systems_to_json({d.ids, d.systems});
  for (std::size_t i = 0; i < d.families.size(); ++i) out[i]["family"] = data::to_string(d.families[i]);
  io::write_json(fs::path(o.out) / "systems.json", out);
  std::printf("wrote %zu systems to %s\n", d.systems.size(), (fs::path(o.out) / "systems.json").c_str());
  return 0;
}

int cmd_distances(const Options& o) {
  const auto set = load(o);
  const auto rep = metric::distance_matrix(set.systems, set.ids, o.cfg.grid(), o.cfg.workers);
  io::write_text(fs::path(o.out) / "distances.csv", rep.matrix.to_csv());
  for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s/%s: %s\n", set.ids[w.i].c_str(), set.ids[w.j].c_str(), w.message.c_str());
  return 0;
}

int cmd_cluster(const Options& o) {
  const auto set = load(o);
  pipeline::RunReport r;
  r.systems = set;
  r.distances = metric::distance_matrix(set.systems, set.ids, o.cfg.grid(), o.cfg.workers);
  r.dendrogram = cluster::complete_linkage(r.distances.matrix);
  r.initial_cut = cluster::cut(r.dendrogram, o.cfg.cut_height);
  const fs::path out(o.out);
  io::write_text(out / "distances.csv", r.distances.matrix.to_csv());
  io::write_json(out / "dendrogram.json", pipeline::dendrogram_json(r));
  io::write_text(out / "dendrogram.svg", svg::dendrogram(r.dendrogram, set.ids, o.cfg.cut_height, "Complete linkage dendrogram"));
  json clusters = json::array();
  for (std::size_t c = 0; c < r.initial_cut.k; ++c) {
    json members = json::array();
    for (std::size_t i : r.initial_cut.members(c)) members.push_back(set.ids[i]);
    clusters.push_back({{"index", c}, {"node", r.initial_cut.nodes[c]}, {"members", members}});
  }
  io::write_json(out / "clusters.json", clusters);
  std::printf("%zu clusters at cut %.3g\n", r.initial_cut.k, o.cfg.cut_height);
  return 0;
}

int cmd_prototype(const Options& o) {
  const auto set = load(o);
  const auto rep = metric::distance_matrix(set.systems, set.ids, o.cfg.grid(), o.cfg.workers);
  const auto res = proto::prototype(set.systems, rep.matrix, o.cfg.prototype_config());
  io::write_json(fs::path(o.out) / "prototypes.json", json::array({pipeline::prototype_to_json(res, set.ids)}));
  std::printf("max distance %.6f -> %.6f, b_max %.6f, certified %s (%s)\n", res.trace.front().max_distance,
              res.max_distance, res.b_max_proto, res.certified ? "yes" : "no", res.stop_reason.c_str());
  return res.certified ? 0 : 2;
}

control::FeedbackConvention convention(const Options& o) {
  return o.negative ? control::FeedbackConvention::negative : control::FeedbackConvention::positive;
}

int cmd_synthesize(const Options& o) {
  const auto set = load(o);
  json out = json::array();
  int status = 0;
  for (std::size_t i = 0; i < set.systems.size(); ++i) {
    try {
      const auto c = control::synthesize(set.systems[i], o.cfg.gamma_rel, convention(o), o.cfg.grid());
      json j = pipeline::controller_to_json(c);
      j["id"] = set.ids[i];
      out.push_back(std::move(j));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "%s: %s\n", set.ids[i].c_str(), e.what());
      out.push_back({{"id", set.ids[i]}, {"error", e.what()}});
      status = 2;
    }
  }
  io::write_json(fs::path(o.out) / "controllers.json", out);
  return status;
}

int cmd_verify(const Options& o) {
  const auto set = load(o);
  const auto gc = load_single(o.controller, "controller");
  const auto gp = load_single(o.prototype, "prototype");
  const double b = control::stability_margin(gp, gc, convention(o), o.cfg.grid());
  const auto reports = control::verify_cluster(gc, gp, set.systems, set.ids, b, convention(o), o.cfg.grid());
  control::ControllerResult res;
  res.Gc = gc;
  res.b_achieved = b;
  res.b_max_plant = coprime::b_max(gp);
  res.gamma_rel = o.cfg.gamma_rel;
  res.convention = convention(o);
  res.member_reports = reports;
  io::write_json(fs::path(o.out) / "verify.json", pipeline::controller_to_json(res));
  int status = 0;
  for (const auto& r : reports) {
    std::printf("%s nu_gap=%.6f margin_ok=%d internally_stable=%d\n", r.id.c_str(), r.nu_gap, r.margin_ok,
                r.internally_stable);
    if (r.margin_ok && !r.internally_stable) status = 2;
  }
  return status;
}

int cmd_embed(const Options& o) {
  const auto set = load(o);
  const auto rep = metric::distance_matrix(set.systems, set.ids, o.cfg.grid(), o.cfg.workers);
  embed::TsneConfig tc;
  tc.seed = Rng::derive_seed(o.cfg.seed, "tsne");
  tc.iterations = o.cfg.tsne_iterations;
  const auto e = embed::tsne(rep.matrix, tc);
  std::vector<std::vector<double>> rows;
  std::string csv = "id,z1,z2,cluster\n";
  std::vector<svg::ScatterPoint> pts;
  for (std::size_t i = 0; i < set.ids.size(); ++i) {
    const double z1 = e.coords(static_cast<Eigen::Index>(i), 0), z2 = e.coords(static_cast<Eigen::Index>(i), 1);
    csv += set.ids[i] + "," + io::format9(z1) + "," + io::format9(z2) + ",-1\n";
    pts.push_back({z1, z2, set.ids[i], 0, false});
  }
  const fs::path out(o.out);
  io::write_text(out / "tsne.csv", csv);
  io::write_text(out / "tsne_kl.csv", pipeline::tsne_kl_csv(e));
  io::write_text(out / "tsne.svg", svg::scatter(pts, {"t-SNE embedding", "z1", "z2", false, 0.0}));
  return 0;
}

int cmd_simulate(const Options& o) {
  const auto set = load(o);
  const fs::path out(o.out);
  io::write_text(out / "step_open.csv", pipeline::step_csv(pipeline::open_loop_steps(set, o.cfg.t_end, o.cfg.dt)));
  if (!o.controller.empty()) {
    const auto gc = load_single(o.controller, "controller");
    io::SystemSet closed;
    closed.ids = set.ids;
    for (const auto& g : set.systems) closed.systems.push_back(control::closed_loop(g, gc, convention(o)));
    io::write_text(out / "step_closed.csv",
                   pipeline::step_csv(pipeline::open_loop_steps(closed, o.cfg.t_end, o.cfg.dt)));
  }
  return 0;
}

int cmd_pipeline(const Options& o) {
  const auto set = load_or_generate(o);
  const auto report = pipeline::run_pipeline(o.cfg, set);
  pipeline::write_artifacts(report, o.cfg, o.out);
  std::printf("%zu systems, %zu initial clusters, %zu final clusters, %zu failures, %zu theorem violations\n",
              set.systems.size(), report.initial_cut.k, report.clusters.size(), report.failures,
              report.theorem_violations);
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return report.failures == 0 && report.theorem_violations == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nu-gap clustering, prototype construction and robust controller design"};
  app.require_subcommand(1);
  Options o;
  auto& c = o.cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "systems JSON");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--cut", c.cut_height, "dendrogram cut height");
    sub->add_option("--seed", c.seed, "root seed");
    sub->add_option("--n", c.n, "number of generated systems");
    sub->add_option("--grid-min", c.grid_min, "lowest grid frequency");
    sub->add_option("--grid-max", c.grid_max, "highest grid frequency");
    sub->add_option("--grid-points", c.grid_points, "grid size");
    sub->add_option("--gamma-rel", c.gamma_rel, "controller suboptimality factor");
    sub->add_option("--kmax", c.k_max, "roll-off tries per prototype step");
    sub->add_option("--max-outer", c.max_outer, "prototype iterations");
    sub->add_option("--t-end", c.t_end, "simulation horizon");
    sub->add_option("--dt", c.dt, "simulation step");
    sub->add_option("--tsne-iterations", c.tsne_iterations, "t-SNE iterations");
    sub->add_option("--workers", c.workers, "distance worker threads (0 = all cores)");
    sub->add_option("--controller", o.controller, "controller JSON (verify, simulate)");
    sub->add_option("--prototype", o.prototype, "prototype JSON (verify)");
    sub->add_flag("--negative-feedback", o.negative, "use u = -Gc y instead of u = Gc y");
  };

  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Cmd cmds[] = {
      {"generate", "generate a seeded plant set", cmd_generate},
      {"distances", "pairwise nu-gap matrix", cmd_distances},
      {"cluster", "complete linkage clustering and cut", cmd_cluster},
      {"prototype", "prototype for one cluster (the whole input)", cmd_prototype},
      {"synthesize", "robust controller for every input system", cmd_synthesize},
      {"verify", "check members against a controller and prototype", cmd_verify},
      {"embed", "t-SNE embedding of the distance matrix", cmd_embed},
      {"simulate", "open (and closed) loop step responses", cmd_simulate},
      {"pipeline", "run everything and write all artifacts", cmd_pipeline},
  };
  int (*chosen)(const Options&) = nullptr;
  for (const auto& cmd : cmds) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    common(sub);
    sub->callback([&chosen, fn = cmd.fn] { chosen = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    c.validate();
    return chosen(o);
  } catch (const io::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
