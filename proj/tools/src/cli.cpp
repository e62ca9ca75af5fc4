#include "hbias/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hbias/collapse.hpp"
#include "hbias/error.hpp"
#include "hbias/io.hpp"
#include "hbias/manifold.hpp"
#include "hbias/metrics.hpp"
#include "hbias/random.hpp"
#include "hbias/synth.hpp"
#include "hbias/version.hpp"

namespace hbias::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fixed(double v, int decimals) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(decimals) << v;
  return s.str();
}

// run.json: what went in and what came out. No timestamps or absolute
// paths beyond what the caller passed, so reruns are byte-identical.
struct Manifest {
  std::string command;
  json inputs = json::object();
  json options = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  json results = json::object();

  void write(const fs::path& dir) const {
    json j;
    j["tool"] = "hbias";
    j["version"] = kVersion;
    j["command"] = command;
    j["inputs"] = inputs;
    j["options"] = options;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["outputs"] = outputs;
    j["results"] = results;
    io::write_file(dir / "run.json", j.dump(2) + "\n");
  }
};

// Shared state for one invocation. Options bind into these fields; the
// selected leaf command's action runs after a successful parse.
struct Options {
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string nc_format = "json";

  std::string edges, classes, groups, name = "hypernym";
  std::string labelspace, log, features, head, config;
  bool random_iso = false;
  std::string priors = "uniform";
  double fraction = 0.95;
  std::int64_t epoch = 0;

  std::size_t k = 10;
  double r_max = 0.0;
  std::size_t grid_points = 200;
  bool exact = false;
  std::size_t direct_sample = 10'000;

  std::vector<std::size_t> tree{3, 2, 4};
  std::size_t dim = 0;
  double edge_length = 1.0;
  std::size_t per_class = 20;
  double noise = 0.1;
  bool trajectory = false;
  std::size_t epochs = 40;
  bool csv_features = false;

  std::vector<double> accuracy, within;
  std::size_t examples = 1000;

  std::size_t class_count = 10;
  double scale = 1.0;

  double p = 0.0;
  std::vector<std::size_t> sizes;
  std::size_t trials = 1'000'000;
};

io::TableFormat table_format(const std::string& f) {
  return f == "json" ? io::TableFormat::json : io::TableFormat::csv;
}

std::string extension(const std::string& f) { return f == "json" ? ".json" : ".csv"; }

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw Error("cannot create output directory '" + dir + "'");
  return p;
}

std::vector<double> priors_for(const Options& o, const PredictionLog& log, std::size_t c_count) {
  if (o.priors == "empirical") return empirical_priors(log);
  return uniform_priors(c_count);
}

struct NamedSpace {
  std::string tag;
  LabelSpace space;
};

// Hyponym, hypernym and (optionally) the seeded random space of equal sizes.
std::vector<NamedSpace> curve_spaces(const Options& o, const LabelSpace& s, Manifest& m) {
  std::vector<NamedSpace> spaces{{"hyponym", LabelSpace::identity(s.class_count())}, {"hypernym", s}};
  if (o.random_iso) {
    spaces.push_back({"random", random_isomorphic(s, o.seed)});
    m.seed = o.seed;
  }
  return spaces;
}

PredictionLog log_in(const NamedSpace& ns, const PredictionLog& log) {
  return ns.tag == "hyponym" ? log : project_log(log, ns.space.mapping());
}

void labelspace_build(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"edges", o.edges}, {"classes", o.classes}, {"groups", o.groups}};
  m.options = {{"name", o.name}};
  const auto h = io::read_hierarchy(o.edges, o.classes);
  const auto s = build_labelspace(h, io::read_groups(fs::path(o.groups)), o.name);
  const auto dir = prepare_out(o.out_dir);
  io::write_labelspace(s, dir / "labelspace.tsv");
  m.outputs = {"labelspace.tsv"};
  m.results["sizes"] = s.sizes();
  out << s.name() << ": " << s.size() << " superclasses over " << s.class_count() << " classes\n";
}

void labelspace_random(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"labelspace", o.labelspace}};
  m.seed = o.seed;
  const auto r = random_isomorphic(io::read_labelspace(fs::path(o.labelspace)), o.seed);
  const auto dir = prepare_out(o.out_dir);
  io::write_labelspace(r, dir / "labelspace.tsv");
  m.outputs = {"labelspace.tsv"};
  m.results["sizes"] = r.sizes();
  out << r.name() << ": " << r.size() << " superclasses over " << r.class_count() << " classes\n";
}

void metrics_curves(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"log", o.log}, {"labelspace", o.labelspace}};
  m.options = {{"random_iso", o.random_iso}, {"priors", o.priors}, {"format", o.format}};
  const auto s = io::read_labelspace(fs::path(o.labelspace));
  const auto log = io::read_predictions(o.log, s.class_count());
  const auto priors = priors_for(o, log, s.class_count());
  const auto dir = prepare_out(o.out_dir);
  const auto fmt = table_format(o.format);
  json skipped = json::array();
  for (const auto& ns : curve_spaces(o, s, m)) {
    const auto a = accuracy_series(log_in(ns, log));
    const double b = baseline(ns.space, priors);
    auto emit = [&](const std::string& what, const std::function<MetricSeries()>& make) {
      try {
        const std::string file = ns.tag + "_" + what + extension(o.format);
        io::write_table(make(), dir / file, fmt);
        m.outputs.push_back(file);
      } catch (const Error& e) {
        skipped.push_back({{"space", ns.tag}, {"series", what}, {"reason", e.what()}});
      }
    };
    emit("accuracy", [&] { return a; });
    emit("relative_accuracy", [&] { return relative_accuracy(a); });
    emit("relative_gain", [&] { return relative_gain(a, b); });
    emit("residual_error", [&] { return residual_error(a); });
    const auto best = a.points[a.argmax()];
    m.results[ns.tag] = {{"baseline", b}, {"best_accuracy", best.value}, {"best_epoch", best.epoch}};
    out << ns.tag << ": chance " << fixed(100.0 * b, 2) << "%, best " << fixed(best.value, 2) << "% at epoch "
        << best.epoch << "\n";
  }
  m.results["skipped"] = skipped;
}

void metrics_converge(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"log", o.log}, {"labelspace", o.labelspace}};
  m.options = {{"random_iso", o.random_iso}, {"fraction", o.fraction}};
  const auto s = io::read_labelspace(fs::path(o.labelspace));
  const auto log = io::read_predictions(o.log, s.class_count());
  const auto dir = prepare_out(o.out_dir);
  std::string table = "space,epoch\n";
  for (const auto& ns : curve_spaces(o, s, m)) {
    const Epoch e = convergence_epoch(relative_accuracy(accuracy_series(log_in(ns, log))), o.fraction);
    table += ns.tag + "," + std::to_string(e) + "\n";
    m.results[ns.tag] = e;
    out << ns.tag << ": epoch " << e << "\n";
  }
  io::write_file(dir / "converge.csv", table);
  m.outputs = {"converge.csv"};
}

void metrics_confusion(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"log", o.log}};
  m.options = {{"epoch", o.epoch}, {"format", o.format}};
  std::optional<LabelSpace> s;
  if (!o.labelspace.empty()) {
    m.inputs["labelspace"] = o.labelspace;
    s = io::read_labelspace(fs::path(o.labelspace));
  }
  std::optional<Hierarchy> h;
  if (!o.edges.empty()) {
    m.inputs["edges"] = o.edges;
    m.inputs["classes"] = o.classes;
    h = io::read_hierarchy(o.edges, o.classes);
  }
  auto log = io::read_predictions(o.log, s ? std::optional(s->class_count())
                                           : h ? std::optional<std::size_t>(h->class_count()) : std::nullopt);
  if (s) log = project_log(log, s->mapping());
  std::vector<Label> order;
  if (h) {
    order = dfs_leaf_order(*h);
  } else {
    order.resize(log.label_count());
    std::iota(order.begin(), order.end(), Label{0});
  }
  const auto cm = confusion_matrix(log, o.epoch, order);
  const auto dir = prepare_out(o.out_dir);
  const std::string file = "confusion" + extension(o.format);
  io::write_table(cm, dir / file, table_format(o.format));
  m.outputs = {file};
  m.results = {{"records", cm.counts.sum()}, {"correct", cm.counts.diagonal().sum()}};
  out << "epoch " << o.epoch << ": " << cm.counts.diagonal().sum() << " of " << cm.counts.sum() << " correct\n";
}

CoverConfig cover_config(const Options& o, Manifest& m) {
  CoverConfig cfg;
  cfg.k = o.k;
  if (o.r_max > 0.0) cfg.r_max = o.r_max;
  cfg.grid_points = o.grid_points;
  cfg.integration = o.exact ? Integration::exact : Integration::trapezoid;
  cfg.seed = o.seed;
  m.seed = o.seed;
  m.options["k"] = o.k;
  m.options["r_max"] = cfg.r_max ? json(*cfg.r_max) : json(nullptr);
  m.options["grid_points"] = o.grid_points;
  m.options["integration"] = o.exact ? "exact" : "trapezoid";
  return cfg;
}

void manifold_cover(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"features", o.features}};
  const auto cfg = cover_config(o, m);
  const auto f = io::read_features(o.features);
  const auto [query, support] = split_query_support(f, cfg);
  const auto a = cover_similarity(query, support, cfg);
  const auto stats = cover_stats(a);
  const auto dir = prepare_out(o.out_dir);
  io::write_similarity_matrix(a, dir / "similarity.csv");
  io::write_distance_matrix(to_distance_matrix(a), dir / "distance.csv");
  m.outputs = {"similarity.csv", "distance.csv"};
  m.results = {{"r_max", a.r_max}, {"self_cover", stats.self_cover}, {"mutual_cover", stats.mutual_cover}};
  out << "self cover " << fixed(stats.self_cover, 6) << ", mutual cover " << fixed(stats.mutual_cover, 6)
      << " (r_max " << fixed(a.r_max, 6) << ")\n";
}

void manifold_ccc(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"features", o.features}, {"edges", o.edges}, {"classes", o.classes}};
  const auto cfg = cover_config(o, m);
  m.options["direct_sample"] = o.direct_sample;
  const auto f = io::read_features(o.features);
  const auto h = io::read_hierarchy(o.edges, o.classes);
  if (h.class_count() != f.class_count) {
    throw Error("features have " + std::to_string(f.class_count) + " classes but the hierarchy has " +
                std::to_string(h.class_count()));
  }
  const auto d_w = graph_distance_matrix(h);
  const auto [query, support] = split_query_support(f, cfg);
  const auto d_f = to_distance_matrix(cover_similarity(query, support, cfg));
  const double cover_ccc = ccc(d_w, d_f);
  const double mean_ccc = ccc(d_w, class_mean_distances(f));
  const double direct = direct_correlation(query, support, d_w, o.direct_sample, o.seed);
  const auto dir = prepare_out(o.out_dir);
  io::write_distance_matrix(d_w, dir / "distance_hierarchy.csv");
  io::write_distance_matrix(d_f, dir / "distance_cover.csv");
  m.outputs = {"distance_hierarchy.csv", "distance_cover.csv"};
  m.results = {{"ccc_cover", cover_ccc}, {"ccc_class_means", mean_ccc}, {"direct_correlation", direct}};
  out << "ccc(cover) " << fixed(cover_ccc, 6) << "\nccc(class means) " << fixed(mean_ccc, 6)
      << "\ndirect correlation " << fixed(direct, 6) << "\n";
}

void nc_compute(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"features", o.features}, {"head", o.head}};
  m.options = {{"format", o.nc_format}};
  const auto f = io::read_features(o.features);
  const auto head = io::read_head(o.head);
  const auto stats = class_statistics(f);
  std::vector<NCReport> reports{nc_report(f, stats, head, "hyponym")};
  if (!o.labelspace.empty()) {
    m.inputs["labelspace"] = o.labelspace;
    const auto s = io::read_labelspace(fs::path(o.labelspace));
    const auto [lifted, lifted_head] = lift_to_superclass(stats, head, s);
    FeatureSet relabeled = f;
    relabeled.class_count = s.size();
    for (auto& y : relabeled.labels) y = s.mapping()[y];
    reports.push_back(nc_report(relabeled, lifted, lifted_head, s.name()));
  }
  const auto dir = prepare_out(o.out_dir);
  const std::vector<std::string> tags{"hyponym", "hypernym"};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string file = "nc_" + tags[i] + extension(o.nc_format);
    io::write_table(reports[i], dir / file, table_format(o.nc_format));
    m.outputs.push_back(file);
    m.results[tags[i]] = json::parse(io::to_json(reports[i]));
    out << reports[i].label_space << ": nc1 " << fixed(reports[i].nc1, 6) << ", nc3 " << fixed(reports[i].nc3, 6)
        << ", nc4 " << fixed(reports[i].nc4, 6) << "\n";
  }
}

void synth_features(const Options& o, Manifest& m, std::ostream& out) {
  if (o.tree.size() != 3) throw CLI::ValidationError("--tree", "expects three counts: superclasses,groups,classes");
  m.seed = o.seed;
  m.options = {{"tree", o.tree}, {"trajectory", o.trajectory}, {"csv", o.csv_features}};
  const auto tree = synth::gen_tree(o.tree[0], o.tree[1], o.tree[2]);
  const auto s = synth::top_level_labelspace(tree);
  const auto dir = prepare_out(o.out_dir);
  io::write_hierarchy(tree, dir / "edges.tsv", dir / "classes.tsv");
  io::write_labelspace(s, dir / "labelspace.tsv");
  m.outputs = {"edges.tsv", "classes.tsv", "labelspace.tsv"};
  const std::string ext = o.csv_features ? ".csv" : ".bin";

  if (!o.trajectory) {
    const std::size_t dim = o.dim ? o.dim : tree.node_count();
    m.options["dim"] = dim;
    m.options["edge_length"] = o.edge_length;
    m.options["per_class"] = o.per_class;
    m.options["noise"] = o.noise;
    const auto means = synth::gen_hierarchy_embedded_means(tree, dim, o.edge_length, o.seed);
    const auto f = synth::sample_features(means, o.per_class, o.noise, CounterRng(o.seed).substream(1).next_u64());
    io::write_features(f, dir / ("features" + ext));
    m.outputs.push_back("features" + ext);
    out << f.size() << " examples of " << f.class_count << " classes in " << dim << " dimensions\n";
    return;
  }

  synth::TrajectoryParams params = synth::TrajectoryParams::standard(o.epochs, o.seed);
  if (!o.config.empty()) {
    m.inputs["config"] = o.config;
    std::ifstream in(o.config);
    if (!in) throw Error("cannot read '" + o.config + "'");
    params = synth::read_trajectory_params(in);
  } else {
    m.options["epochs"] = o.epochs;
  }
  params.seed = o.seed;
  if (o.dim) params.dim = o.dim;
  m.options["dim"] = params.dim;
  m.options["examples_per_class"] = params.examples_per_class;
  const auto traj = synth::gen_hierarchical_trajectory(s, params);
  for (const auto& f : traj) {
    const std::string file = "features_e" + std::to_string(*f.epoch) + ext;
    io::write_features(f, dir / file);
    m.outputs.push_back(file);
  }
  io::write_predictions(synth::nearest_centroid_log(traj), dir / "predictions.csv");
  m.outputs.push_back("predictions.csv");
  out << traj.size() << " epochs of " << traj.front().size() << " examples\n";
}

void synth_predictions(const Options& o, Manifest& m, std::ostream& out) {
  m.inputs = {{"labelspace", o.labelspace}};
  m.seed = o.seed;
  std::vector<double> within = o.within;
  if (within.size() == 1) within.assign(o.accuracy.size(), within[0]);
  m.options = {{"accuracy", o.accuracy}, {"within", within}, {"examples", o.examples}};
  const auto s = io::read_labelspace(fs::path(o.labelspace));
  const auto traj = synth::gen_prediction_trajectory(s, o.accuracy, within, o.examples, o.seed);
  const auto dir = prepare_out(o.out_dir);
  io::write_predictions(traj.log, dir / "predictions.csv");
  m.outputs = {"predictions.csv"};
  m.results["fallback_epochs"] = traj.fallback_epochs;
  out << traj.log.size() << " records over " << o.accuracy.size() << " epochs\n";
  if (!traj.fallback_epochs.empty()) {
    out << "warning: singleton superclasses forced uniform errors at " << traj.fallback_epochs.size() << " epochs\n";
  }
}

void synth_etf(const Options& o, Manifest& m, std::ostream& out) {
  const std::size_t dim = o.dim ? o.dim : o.class_count;
  m.options = {{"classes", o.class_count}, {"dim", dim}, {"scale", o.scale}, {"per_class", o.per_class}};
  const Matrix means = synth::gen_etf(o.class_count, dim, o.scale);
  FeatureSet f;
  f.class_count = o.class_count;
  f.vectors.resize(static_cast<Eigen::Index>(o.class_count * o.per_class), static_cast<Eigen::Index>(dim));
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < means.rows(); ++c) {
    for (std::size_t i = 0; i < o.per_class; ++i, ++row) {
      f.vectors.row(row) = means.row(c);
      f.labels.push_back(static_cast<Label>(c));
    }
  }
  const ClassifierHead head{means, -0.5 * means.rowwise().squaredNorm()};
  const auto dir = prepare_out(o.out_dir);
  io::write_features(f, dir / "features.bin");
  io::write_head(head, dir / "head.bin");
  m.outputs = {"features.bin", "head.bin"};
  out << o.class_count << "-class simplex in " << dim << " dimensions\n";
}

void oracle_superclass_acc(const Options& o, Manifest& m, std::ostream& out) {
  m.seed = o.seed;
  m.options = {{"p", o.p}, {"sizes", o.sizes}, {"trials", o.trials}};
  LabelMapping mapping;
  for (std::size_t k = 0; k < o.sizes.size(); ++k) mapping.table.insert(mapping.table.end(), o.sizes[k], static_cast<Label>(k));
  const auto s = LabelSpace::from_mapping("sizes", mapping);
  const double analytic = theoretical_superclass_accuracy(o.p, s, uniform_priors(s.class_count()));
  const auto mc = synth::mc_superclass_accuracy(o.p, o.sizes, o.trials, o.seed);
  m.results = {{"analytic", analytic}, {"monte_carlo", mc.estimate}, {"standard_error", mc.standard_error}};
  out << "analytic " << fixed(analytic, 6) << "\nmonte_carlo " << fixed(mc.estimate, 6) << " (se "
      << fixed(mc.standard_error, 6) << ", " << o.trials << " trials)\n";
  if (!o.out_dir.empty()) prepare_out(o.out_dir);
}

// The innermost selected subcommand, for usage text.
CLI::App* deepest(CLI::App& app) {
  CLI::App* cur = &app;
  for (;;) {
    const auto subs = cur->get_subcommands();
    if (subs.empty()) return cur;
    cur = subs.front();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Hypernym-bias analysis toolkit", "hbias"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  using Action = void (*)(const Options&, Manifest&, std::ostream&);
  std::vector<std::pair<CLI::App*, Action>> leaves;
  const std::vector<std::string> formats{"csv", "json"};

  auto leaf = [&](CLI::App* group, const std::string& name, const std::string& help, Action action,
                  bool out_required = true) {
    CLI::App* sub = group->add_subcommand(name, help);
    auto* out_opt = sub->add_option("--out", o.out_dir, "Output directory");
    if (out_required) out_opt->required();
    leaves.emplace_back(sub, action);
    return sub;
  };
  auto existing = [](CLI::App* sub, const std::string& flag, std::string& target, const std::string& help) {
    return sub->add_option(flag, target, help)->check(CLI::ExistingFile);
  };

  // labelspace
  auto* ls = app.add_subcommand("labelspace", "Build or randomize superclass label spaces");
  ls->require_subcommand(1);
  {
    auto* b = leaf(ls, "build", "Group classes under hierarchy nodes", labelspace_build);
    existing(b, "--edges", o.edges, "Hierarchy edges (parent<TAB>child)")->required();
    existing(b, "--classes", o.classes, "Class index file (index<TAB>node)")->required();
    existing(b, "--groups", o.groups, "Grouping spec (name<TAB>node,...)")->required();
    b->add_option("--name", o.name, "Label space name")->capture_default_str();

    auto* r = leaf(ls, "random", "Random partition with the same superclass sizes", labelspace_random);
    existing(r, "--labelspace", o.labelspace, "Source label space")->required();
    r->add_option("--seed", o.seed, "Random seed")->required();
  }

  // metrics
  auto* mt = app.add_subcommand("metrics", "Accuracy curves, convergence and confusion");
  mt->require_subcommand(1);
  {
    auto curve_inputs = [&](CLI::App* sub) {
      existing(sub, "--log", o.log, "Prediction log CSV")->required();
      existing(sub, "--labelspace", o.labelspace, "Hypernym label space")->required();
      auto* seed = sub->add_option("--seed", o.seed, "Seed of the random size-isomorphic space");
      sub->add_flag("--random-iso", o.random_iso, "Also evaluate a random size-isomorphic space")->needs(seed);
    };
    auto* c = leaf(mt, "curves", "A, A_R, G_R and E_R per label space", metrics_curves);
    curve_inputs(c);
    c->add_option("--priors", o.priors, "Class priors for the chance baseline")
        ->check(CLI::IsMember({"uniform", "empirical"}))
        ->capture_default_str();
    c->add_option("--format", o.format, "Table format")->check(CLI::IsMember(formats))->capture_default_str();

    auto* v = leaf(mt, "converge", "First epoch reaching a fraction of the best accuracy", metrics_converge);
    curve_inputs(v);
    v->add_option("--fraction", o.fraction, "Fraction of the maximum")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    auto* f = leaf(mt, "confusion", "Confusion counts for one epoch", metrics_confusion);
    existing(f, "--log", o.log, "Prediction log CSV")->required();
    f->add_option("--epoch", o.epoch, "Epoch to tabulate")->required();
    auto* lsopt = existing(f, "--labelspace", o.labelspace, "Project onto this label space first");
    auto* e = existing(f, "--edges", o.edges, "Hierarchy edges, for depth-first class order");
    auto* cl = existing(f, "--classes", o.classes, "Hierarchy class index");
    e->needs(cl);
    cl->needs(e);
    lsopt->excludes(e);
    f->add_option("--format", o.format, "Table format")->check(CLI::IsMember(formats))->capture_default_str();
  }

  // manifold
  auto* mf = app.add_subcommand("manifold", "Mutual-cover similarity and hierarchy correlation");
  mf->require_subcommand(1);
  {
    auto cover_inputs = [&](CLI::App* sub) {
      existing(sub, "--features", o.features, "Feature file (.bin or .csv)")->required();
      sub->add_option("--k", o.k, "Examples per class on each side")->check(CLI::PositiveNumber)->capture_default_str();
      sub->add_option("--r-max", o.r_max, "Integration radius (default: largest nearest distance)")
          ->check(CLI::PositiveNumber);
      sub->add_option("--grid-points", o.grid_points, "Radius grid size")->check(CLI::Range(2, 1 << 24))->capture_default_str();
      sub->add_flag("--exact", o.exact, "Integrate the step function exactly");
      sub->add_option("--seed", o.seed, "Seed of the query/support split")->required();
    };
    auto* c = leaf(mf, "cover", "Similarity and distance matrices from mutual cover", manifold_cover);
    cover_inputs(c);
    auto* k = leaf(mf, "ccc", "Correlation of feature and hierarchy distances", manifold_ccc);
    cover_inputs(k);
    existing(k, "--edges", o.edges, "Hierarchy edges")->required();
    existing(k, "--classes", o.classes, "Hierarchy class index")->required();
    k->add_option("--direct-sample", o.direct_sample, "Pairs sampled for the direct correlation (0: all)")
        ->capture_default_str();
  }

  // nc
  auto* nc = app.add_subcommand("nc", "Neural-collapse metrics");
  nc->require_subcommand(1);
  {
    auto* c = leaf(nc, "compute", "NC1-NC4 in the class space and optionally a superclass space", nc_compute);
    existing(c, "--features", o.features, "Feature file")->required();
    existing(c, "--head", o.head, "Classifier head file")->required();
    existing(c, "--labelspace", o.labelspace, "Superclass label space to lift into");
    c->add_option("--format", o.nc_format, "Report format")->check(CLI::IsMember(formats))->capture_default_str();
  }

  // synth
  auto* sy = app.add_subcommand("synth", "Synthetic data");
  sy->require_subcommand(1);
  {
    auto* f = leaf(sy, "features", "Hierarchy-embedded features or a feature trajectory", synth_features);
    f->add_option("--tree", o.tree, "superclasses,groups,classes per group")->delimiter(',')->capture_default_str();
    f->add_option("--dim", o.dim, "Feature dimension (default: node count, or 64 for trajectories)");
    f->add_option("--edge-length", o.edge_length, "Distance per tree edge")->capture_default_str();
    f->add_option("--per-class", o.per_class, "Examples per class (trajectories take it from --config)")->capture_default_str();
    f->add_option("--noise", o.noise, "Noise standard deviation (snapshot mode)")->capture_default_str();
    f->add_option("--seed", o.seed, "Random seed")->required();
    f->add_flag("--trajectory", o.trajectory, "Write one snapshot per epoch and a nearest-centroid log");
    auto* ep = f->add_option("--epochs", o.epochs, "Epochs of the standard schedule")->capture_default_str();
    auto* cfg = existing(f, "--config", o.config, "Trajectory parameters (key=value)");
    cfg->excludes(ep);
    f->add_flag("--csv", o.csv_features, "Write features as CSV");

    auto* p = leaf(sy, "predictions", "Prediction log with a given accuracy schedule", synth_predictions);
    existing(p, "--labelspace", o.labelspace, "Superclass label space")->required();
    p->add_option("--accuracy", o.accuracy, "Per-epoch accuracy, comma separated")->delimiter(',')->required();
    p->add_option("--within", o.within, "Per-epoch fraction of errors kept inside the superclass")
        ->delimiter(',')
        ->required();
    p->add_option("--examples", o.examples, "Examples per epoch")->capture_default_str();
    p->add_option("--seed", o.seed, "Random seed")->required();

    auto* e = leaf(sy, "etf", "Exact simplex ETF features with a nearest-mean head", synth_etf);
    e->add_option("--classes", o.class_count, "Number of classes")->capture_default_str();
    e->add_option("--dim", o.dim, "Feature dimension (default: classes)");
    e->add_option("--scale", o.scale, "Norm of each mean")->capture_default_str();
    e->add_option("--per-class", o.per_class, "Copies of each mean")->capture_default_str();
  }

  // oracle
  auto* orc = app.add_subcommand("oracle", "Closed-form and simulated reference values");
  orc->require_subcommand(1);
  {
    auto* s = leaf(orc, "superclass-acc", "Superclass accuracy of a random grouping", oracle_superclass_acc, false);
    s->add_option("--p", o.p, "Hyponym accuracy")->check(CLI::Range(0.0, 1.0))->required();
    s->add_option("--sizes", o.sizes, "Superclass sizes, comma separated")->delimiter(',')->required();
    s->add_option("--trials", o.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--seed", o.seed, "Monte-Carlo seed")->capture_default_str();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << deepest(app)->help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << deepest(app)->help();
    return 2;
  }

  for (const auto& [sub, action] : leaves) {
    if (!sub->parsed()) continue;
    Manifest manifest;
    manifest.command = sub->get_parent()->get_name() + " " + sub->get_name();
    try {
      action(o, manifest, out);
      if (!o.out_dir.empty()) manifest.write(o.out_dir);
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n\n" << sub->help();
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  err << app.help();
  return 2;
}

}  // namespace hbias::cli
