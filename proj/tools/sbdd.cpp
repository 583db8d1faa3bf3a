// sbdd: command-line front end for dataset synthesis, training, generation
// and evaluation. Every run writes a manifest next to its output.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "sbdd/affinity/training.hpp"
#include "sbdd/bench/checkpoint.hpp"
#include "sbdd/bench/eval.hpp"
#include "sbdd/bench/io.hpp"
#include "sbdd/bench/metrics.hpp"
#include "sbdd/bench/synth.hpp"
#include "sbdd/chem/smiles.hpp"
#include "sbdd/design/atoms.hpp"
#include "sbdd/design/pipeline.hpp"
#include "sbdd/design/structures.hpp"
#include "sbdd/error.hpp"
#include "sbdd/expressivity/refine.hpp"

#ifndef SBDD_DATA_DIR
#define SBDD_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sbdd;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out;
  int threads = 1;
  json config = json::object();
};

// Value from the command line if given, else from the config file, else
// the default already held in `value`.
template <class T>
void resolve(T& value, const CLI::Option* flag, const json& cfg, const char* key) {
  if (flag && flag->count() > 0) return;
  if (cfg.contains(key)) {
    try {
      value = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

fs::path require_out(const Globals& g, const char* what) {
  if (g.out.empty()) throw ValidationError(std::string("--out is required for ") + what);
  return g.out;
}

fs::path manifest_path(const fs::path& out) {
  if (fs::is_directory(out)) return out / "manifest.json";
  return fs::path(out.string() + ".manifest.json");
}

void write_manifest(const fs::path& out, const std::string& command, const Globals& g, const json& effective,
                    const std::vector<std::string>& argv) {
  const std::string dumped = effective.dump();
  const json m{{"command", command},
               {"argv", argv},
               {"seed", g.seed},
               {"threads", g.threads},
               {"config", effective},
               {"config_hash", hex64(stable_hash(dumped))},
               {"versions",
                {{"sbdd", kVersion},
                 {"checkpoint_format", bench::kCheckpointVersion},
                 {"oracle_weights", dock::kWeightsVersion},
                 {"eigen",
                  std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)}}}};
  bench::write_json(manifest_path(out), m);
}

json oracle_json(const dock::DockConfig& c) {
  return {{"rigid_only", c.rigid_only}, {"multistart", c.multistart}, {"max_iters", c.max_iters},
          {"cutoff", c.cutoff_angstrom}, {"grad_tol", c.grad_tol},    {"mc_steps", c.mc_steps},
          {"mc_shift", c.mc_shift},      {"mc_turn", c.mc_turn}};
}

dock::DockConfig oracle_from(const json& cfg) {
  dock::DockConfig c;
  if (!cfg.contains("oracle")) return c;
  const auto& o = cfg.at("oracle");
  resolve(c.rigid_only, nullptr, o, "rigid_only");
  resolve(c.multistart, nullptr, o, "multistart");
  resolve(c.max_iters, nullptr, o, "max_iters");
  resolve(c.cutoff_angstrom, nullptr, o, "cutoff");
  resolve(c.grad_tol, nullptr, o, "grad_tol");
  resolve(c.mc_steps, nullptr, o, "mc_steps");
  resolve(c.mc_shift, nullptr, o, "mc_shift");
  resolve(c.mc_turn, nullptr, o, "mc_turn");
  if (c.multistart < 1 || c.max_iters < 1 || c.mc_steps < 0 || !(c.cutoff_angstrom > 1.0)) {
    throw ValidationError("oracle settings out of range");
  }
  return c;
}

dock::InteractionWeights weights_from(const json& cfg) {
  if (!cfg.contains("weights_file")) return {};
  return dock::weights_from_json(bench::read_text(cfg.at("weights_file").get<std::string>()));
}

std::vector<chem::LigandEntry> load_ligands(const std::string& path) {
  auto f = chem::read_ligands(fs::path(path));
  if (f.skipped > 0) spdlog::warn("{}: skipped {} unparseable or invalid lines", path, f.skipped);
  if (f.entries.empty()) throw ValidationError("no usable ligands in " + path);
  return std::move(f.entries);
}

affinity::TrainConfig train_config_from(const json& cfg, std::uint64_t seed) {
  affinity::TrainConfig t;
  t.seed = seed;
  resolve(t.lr, nullptr, cfg, "lr");
  resolve(t.batch_size, nullptr, cfg, "batch_size");
  resolve(t.max_steps, nullptr, cfg, "max_steps");
  resolve(t.split_fraction, nullptr, cfg, "split_fraction");
  resolve(t.eval_every, nullptr, cfg, "eval_every");
  resolve(t.patience, nullptr, cfg, "patience");
  if (!(t.lr > 0) || t.batch_size < 1 || t.max_steps < 0 || t.eval_every < 1 || t.patience < 1 ||
      t.split_fraction < 0 || t.split_fraction >= 1) {
    throw ValidationError("training settings out of range");
  }
  return t;
}

json train_json(const affinity::TrainConfig& t) {
  return {{"lr", t.lr},
          {"batch_size", t.batch_size},
          {"max_steps", t.max_steps},
          {"split_fraction", t.split_fraction},
          {"eval_every", t.eval_every},
          {"patience", t.patience}};
}

void write_log_csv(const fs::path& path, const std::vector<affinity::TrainLogEntry>& log) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "step,train_loss,val_loss\n";
  out.precision(17);
  for (const auto& e : log) out << e.step << ',' << e.train_loss << ',' << e.val_loss << '\n';
}

// ---------------------------------------------------------------------------

struct MakeDataset {
  int n_pockets = 20, min_residues = 20, max_residues = 36, extras = 50;
  std::string ligands = std::string(SBDD_DATA_DIR) + "/ligands.jsonl";
  CLI::Option *o_pockets{}, *o_extras{}, *o_ligands{};

  void add(CLI::App& sub) {
    o_pockets = sub.add_option("--pockets", n_pockets, "number of synthetic pockets");
    o_extras = sub.add_option("--extras", extras, "random ligands per pocket besides the reference");
    o_ligands = sub.add_option("--ligands", ligands, "ligand db (JSON Lines of id/smiles)");
  }

  void run(const Globals& g, const std::vector<std::string>& argv) {
    const auto out = require_out(g, "make-dataset");
    resolve(n_pockets, o_pockets, g.config, "n_pockets");
    resolve(extras, o_extras, g.config, "extras_per_pocket");
    resolve(ligands, o_ligands, g.config, "ligand_db");
    resolve(min_residues, nullptr, g.config, "min_residues");
    resolve(max_residues, nullptr, g.config, "max_residues");
    bench::SynthConfig cfg;
    cfg.n_pockets = n_pockets;
    cfg.min_residues = min_residues;
    cfg.max_residues = max_residues;
    cfg.extras_per_pocket = extras;
    cfg.ligand_db_path = ligands;
    cfg.seed = g.seed;
    cfg.oracle = oracle_from(g.config);
    cfg.weights = weights_from(g.config);
    cfg.threads = g.threads;
    const auto db = load_ligands(ligands);
    spdlog::info("labelling {} pairs", static_cast<long>(n_pockets) * (extras + 1));
    const auto ds = bench::synth_dataset(cfg, db);
    bench::write_dataset(out, ds);
    json eff{{"n_pockets", n_pockets}, {"extras_per_pocket", extras},  {"ligand_db", ligands},
             {"min_residues", min_residues}, {"max_residues", max_residues}, {"oracle", oracle_json(cfg.oracle)}};
    if (g.config.contains("weights_file")) eff["weights_file"] = g.config["weights_file"];
    write_manifest(out, "make-dataset", g, eff, argv);
    std::cout << json{{"records", ds.records.size()}, {"pockets", ds.pockets.size()}, {"out", out.string()}}.dump()
              << '\n';
  }
};

struct TrainScorer {
  std::string data;
  void add(CLI::App& sub) { sub.add_option("--data", data, "dataset directory")->required(); }

  void run(const Globals& g, const std::vector<std::string>& argv) {
    const auto out = require_out(g, "train-scorer");
    const auto ds = bench::read_dataset(data);
    const auto cfg = train_config_from(g.config, g.seed);
    const auto res = affinity::train_scorer(ds.records, bench::pocket_map(ds.pockets), cfg);
    for (const auto& w : res.warnings) spdlog::warn("{}", w);
    bench::save_checkpoint(out, bench::make_checkpoint(res.params, cfg));
    write_log_csv(fs::path(out.string() + ".log.csv"), res.log);
    write_manifest(out, "train-scorer", g, {{"data", data}, {"train", train_json(cfg)}}, argv);
    std::cout << json{{"best_val_loss", res.best_val_loss}, {"best_step", res.best_step}, {"out", out.string()}}.dump()
              << '\n';
  }
};

struct TrainCom {
  std::string data;
  void add(CLI::App& sub) { sub.add_option("--data", data, "dataset directory")->required(); }

  void run(const Globals& g, const std::vector<std::string>& argv) {
    const auto out = require_out(g, "train-com");
    const auto ds = bench::read_dataset(data);
    const auto pockets = bench::pocket_map(ds.pockets);
    std::vector<affinity::ComExample> ex;
    for (const auto& r : ds.references) {
      const auto it = pockets.find(r.pocket_id);
      if (it == pockets.end()) throw ValidationError("reference for unknown pocket '" + r.pocket_id + "'");
      ex.push_back({it->second, r.com});
    }
    if (ex.empty()) throw ValidationError("dataset has no reference ligands to train on");
    auto cfg = train_config_from(g.config, g.seed);
    if (!g.config.contains("batch_size")) cfg.batch_size = 16;
    const auto res = affinity::train_com(ex, cfg);
    bench::save_checkpoint(out, bench::make_checkpoint(res.params, cfg));
    write_log_csv(fs::path(out.string() + ".log.csv"), res.log);
    write_manifest(out, "train-com", g, {{"data", data}, {"train", train_json(cfg)}}, argv);
    std::cout << json{{"val_error", res.val_error}, {"best_step", res.best_step}, {"out", out.string()}}.dump() << '\n';
  }
};

struct Generate {
  bool po = false;
  std::string pocket, scorer, com, objective = "size_penalty=1,ring_bonus=1,hetero_fraction=1";
  std::string ligands = std::string(SBDD_DATA_DIR) + "/ligands.jsonl";
  int n = 100, proposals = 50;
  double lo = 5.0, hi = 10.0;

  void add(CLI::App& sub) {
    sub.add_option("--pocket", pocket, "pocket JSON (one object or an array)")->required();
    sub.add_option("--scorer", scorer, "scorer checkpoint")->required();
    sub.add_option("--com", com, "centre-of-mass checkpoint")->required();
    sub.add_option("--n", n, "candidates per pocket")->check(CLI::PositiveNumber);
    sub.add_option("--ligands", ligands, "structure db source");
    sub.add_option("--lo", lo, "lower percentile of the window");
    sub.add_option("--hi", hi, "upper percentile of the window");
    if (po) {
      sub.add_option("--objective", objective, "name=weight,...");
      sub.add_option("--proposals", proposals, "proposals per output")->check(CLI::PositiveNumber);
    }
  }

  void run(const Globals& g, const std::vector<std::string>& argv) {
    const auto out = require_out(g, po ? "generate-po" : "generate");
    const auto db_entries = load_ligands(ligands);
    const auto db = design::StructureDb::from_ligands(db_entries);
    std::vector<chem::MolecularGraph> corpus;
    for (const auto& e : db_entries) corpus.push_back(e.molecule);
    const auto atoms = design::build_atom_table(corpus);
    const auto sp = bench::load_scorer(scorer);
    const auto cp = bench::load_com(com);
    const design::Pipeline pipe{&db, &atoms, &sp, &cp, lo, hi};
    const auto obj = design::parse_objective(objective);

    std::ofstream file(out, std::ios::binary);
    if (!file) throw ValidationError("cannot write " + out.string());
    const Rng root(g.seed);
    std::size_t total = 0;
    for (const auto& p : bench::read_pockets(pocket)) {
      const Rng rng = root.split(stable_hash(p.id));
      const auto cands =
          po ? design::generate_po(pipe, p, n, obj, proposals, rng) : design::generate(pipe, p, n, rng);
      bench::write_candidates(file, cands, p.id);
      total += cands.size();
    }
    file.close();
    json eff{{"pocket", pocket}, {"scorer", scorer}, {"com", com}, {"n", n}, {"ligands", ligands}, {"window", {lo, hi}}};
    if (po) {
      eff["objective"] = objective;
      eff["proposals"] = proposals;
    }
    write_manifest(out, po ? "generate-po" : "generate", g, eff, argv);
    std::cout << json{{"candidates", total}, {"out", out.string()}}.dump() << '\n';
  }
};

struct Repurpose {
  std::string pocket, scorer, ligands = std::string(SBDD_DATA_DIR) + "/ligands.jsonl";
  int k = 10;
  std::size_t sample = 16384;

  void add(CLI::App& sub) {
    sub.add_option("--pocket", pocket, "pocket JSON")->required();
    sub.add_option("--scorer", scorer, "scorer checkpoint")->required();
    sub.add_option("--ligands", ligands, "library to scan");
    sub.add_option("--k", k, "hits to return")->check(CLI::PositiveNumber);
    sub.add_option("--sample-size", sample, "entries scanned");
  }

  void run(const Globals& g, const std::vector<std::string>& argv) {
    const auto entries = load_ligands(ligands);
    const auto db = design::StructureDb::from_ligands(entries, false);
    const auto sp = bench::load_scorer(scorer);
    json results = json::array();
    for (const auto& p : bench::read_pockets(pocket)) {
      const auto res = design::repurpose_scan(p, db, sp, k, Rng(g.seed).split(stable_hash(p.id)), sample);
      json hits = json::array();
      for (const auto& h : res.hits) {
        hits.push_back({{"id", db[h.index].id}, {"smiles", db[h.index].smiles}, {"score", h.score}});
      }
      json r{{"pocket_id", p.id},
             {"hits", hits},
             {"window", {res.window.first, res.window.second}},
             {"scanned", res.scanned},
             {"window_population", res.window_population}};
      if (res.note) r["note"] = *res.note;
      results.push_back(r);
    }
    if (!g.out.empty()) {
      bench::write_json(g.out, results);
      write_manifest(g.out, "repurpose", g,
                     {{"pocket", pocket}, {"scorer", scorer}, {"ligands", ligands}, {"k", k}, {"sample_size", sample}},
                     argv);
    }
    std::cout << results.dump(1) << '\n';
  }
};

struct ExpressivityCheck {
  std::string smiles1 = "C1CCC2CCCCC2C1", smiles2 = "C1CCC(C1)C2CCCC2", graph1, graph2, pocket;
  int L = 20;
  bool labelled = false;

  void add(CLI::App& sub) {
    sub.add_option("--smiles1", smiles1, "first molecule");
    sub.add_option("--smiles2", smiles2, "second molecule");
    sub.add_option("--graph1", graph1, "first featured graph JSON (overrides --smiles1)");
    sub.add_option("--graph2", graph2, "second featured graph JSON (overrides --smiles2)");
    sub.add_option("--depth", L, "refinement depth")->check(CLI::NonNegativeNumber);
    sub.add_option("--pocket", pocket, "pocket JSON for a complex-graph check");
    sub.add_flag("--labelled", labelled, "keep element and bond-order tokens");
  }

  static expressivity::FeaturedGraph graph_from_json(const json& j) {
    try {
      std::vector<std::string> nodes = j.at("nodes").get<std::vector<std::string>>();
      std::vector<expressivity::FeaturedEdge> edges;
      for (const auto& e : j.at("edges")) {
        edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.size() > 2 ? e.at(2).get<std::string>() : "-"});
      }
      std::optional<Coords> coords;
      if (j.contains("coords")) coords = bench::coords_from_json(j.at("coords"));
      return {std::move(nodes), std::move(edges), std::move(coords)};
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed featured graph: ") + e.what());
    }
  }

  expressivity::FeaturedGraph load(const std::string& path, const std::string& smiles, features::StructuralFeatures* f,
                                   bool* from_smiles) const {
    if (!path.empty()) {
      *from_smiles = false;
      return graph_from_json(bench::read_json(path));
    }
    *from_smiles = true;
    const auto m = chem::parse_smiles(smiles);
    *f = features::extract(m.topology());
    return expressivity::from_molecule(m.with_pose(expressivity::unit_bond_coordinates(m)), !labelled);
  }

  static json cert_json(const expressivity::PropertyCertificate& c) {
    return {{"girth", c.girth},
            {"largest_cycle", c.largest_cycle},
            {"cut_edges", c.cut_edges},
            {"conjoined_cycles", c.conjoined_cycles},
            {"cycle_count", c.cycle_count}};
  }

  void run(const Globals& g, const std::vector<std::string>& argv) {
    const auto t0 = std::chrono::steady_clock::now();
    features::StructuralFeatures f1, f2;
    bool s1 = false, s2 = false;
    const auto g1 = load(graph1, smiles1, &f1, &s1);
    const auto g2 = load(graph2, smiles2, &f2, &s2);
    json verdicts = json::object();
    for (auto mode : {expressivity::Mode::LU, expressivity::Mode::LU3D}) {
      if (mode == expressivity::Mode::LU3D && (!g1.coords() || !g2.coords())) continue;
      const auto v = expressivity::indistinguishable(g1, g2, mode, L);
      json pairing = json::array();
      for (auto [a, b] : v.pairing) pairing.push_back({a, b});
      verdicts[std::string(expressivity::mode_name(mode))] = {
          {"indistinguishable", v.indistinguishable}, {"depth", v.depth}, {"pairing", pairing}};
    }
    json result{{"verdicts", verdicts}};
    if (g1.n_nodes() <= expressivity::kMaxCertificateNodes && g2.n_nodes() <= expressivity::kMaxCertificateNodes) {
      result["certificates"] = {cert_json(expressivity::graph_properties(g1)),
                                cert_json(expressivity::graph_properties(g2))};
    }
    if (s1 && s2) result["features"] = {bench::features_to_json(f1), bench::features_to_json(f2)};
    if (!pocket.empty() && verdicts["LU"]["indistinguishable"].get<bool>()) {
      const auto p = expressivity::from_pocket(bench::read_pockets(pocket).front());
      const auto r = expressivity::verify_prop1(
          p, g1, g2, [](const std::string& a, const std::string& b) { return a + "|" + b; }, L);
      result["complex"] = {{"indistinguishable", r.holds}, {"depth", r.complexes.depth}};
    }
    result["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!g.out.empty()) {
      bench::write_json(g.out, result);
      write_manifest(g.out, "expressivity-check", g,
                     {{"smiles1", smiles1}, {"smiles2", smiles2}, {"graph1", graph1}, {"graph2", graph2}, {"depth", L},
                      {"labelled", labelled}, {"pocket", pocket}},
                     argv);
    }
    std::cout << result.dump(1) << '\n';
  }
};

struct Eval {
  std::string candidates, pocket, references, train_ligands;
  std::uint64_t oracle_seed = 0;

  void add(CLI::App& sub) {
    sub.add_option("--candidates", candidates, "candidate JSON Lines")->required();
    sub.add_option("--pocket", pocket, "pocket JSON")->required();
    sub.add_option("--oracle-seed", oracle_seed, "seed for the docking oracle");
    sub.add_option("--references", references, "references.json of a dataset, for high-affinity fractions");
    sub.add_option("--train-ligands", train_ligands, "training ligands (JSON Lines), for novelty");
  }

  void run(const Globals& g, const std::vector<std::string>& argv) {
    const auto out = require_out(g, "eval");
    const auto file = bench::read_candidates(candidates);
    const auto pockets = bench::pocket_map(bench::read_pockets(pocket));
    std::map<std::string, std::vector<chem::MolecularGraph>> mols;
    std::map<std::string, std::vector<Coords>> poses;
    for (const auto& [id, cs] : file.by_pocket) {
      for (const auto& c : cs) {
        mols[id].push_back(c.molecule);
        poses[id].push_back(c.pose);
      }
    }
    std::map<std::string, double> refs;
    if (!references.empty()) {
      for (const auto& r : bench::read_json(references)) refs[r.at("pocket_id").get<std::string>()] = r.at("score");
    }
    std::vector<chem::Fingerprint> train;
    if (!train_ligands.empty()) {
      for (const auto& e : load_ligands(train_ligands)) train.push_back(chem::fingerprint(e.molecule));
    }
    bench::EvalSettings s;
    s.weights = weights_from(g.config);
    s.oracle = oracle_from(g.config);
    s.oracle_seed = oracle_seed;
    s.threads = g.threads;
    const auto report = bench::evaluate(pockets, file.pocket_ids, mols, poses, refs, train, s);
    bench::write_json(out, bench::report_to_json(report));
    bench::write_json(fs::path(out.string() + ".timing.json"), bench::timing_to_json(report));
    write_manifest(out, "eval", g,
                   {{"candidates", candidates}, {"pocket", pocket}, {"oracle_seed", oracle_seed},
                    {"references", references}, {"train_ligands", train_ligands}, {"oracle", oracle_json(s.oracle)}},
                   argv);
    std::cout << bench::report_to_json(report)["aggregate"].dump() << '\n';
  }
};

struct Throughput {
  std::string scorer, ligands = std::string(SBDD_DATA_DIR) + "/ligands.jsonl";
  int residues = 30, molecules = 16384, repeats = 5;

  void add(CLI::App& sub) {
    sub.add_option("--scorer", scorer, "scorer checkpoint (random weights when absent)");
    sub.add_option("--ligands", ligands, "template source, cycled up to --molecules");
    sub.add_option("--residues", residues, "pocket size")->check(CLI::PositiveNumber);
    sub.add_option("--molecules", molecules, "molecules per pass")->check(CLI::PositiveNumber);
    sub.add_option("--repeats", repeats, "timed passes")->check(CLI::PositiveNumber);
  }

  void run(const Globals& g, const std::vector<std::string>& argv) {
    using clock = std::chrono::steady_clock;
    Rng rng(g.seed);
    const auto params = scorer.empty() ? affinity::make_scorer(rng) : bench::load_scorer(scorer);
    const auto pocket = bench::random_pocket(rng, residues, "bench");
    const auto entries = load_ligands(ligands);

    // feature extraction and the library scan are timed together
    const auto t0 = clock::now();
    design::StructureDb db(false);
    for (int i = 0; i < molecules; ++i) db.add(entries[static_cast<std::size_t>(i) % entries.size()].molecule.topology());
    const auto scan = design::repurpose_scan(pocket, db, params, 10, rng.split(1), static_cast<std::size_t>(molecules));
    const double scan_s = std::chrono::duration<double>(clock::now() - t0).count();

    double best = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const auto t1 = clock::now();
      const auto scores = affinity::score_batch(params, db.features(), pocket);
      const double s = std::chrono::duration<double>(clock::now() - t1).count();
      if (scores.size() != db.size()) throw NumericError("score_batch returned the wrong count");
      best = std::max(best, static_cast<double>(scores.size()) / s);
    }
    const json result{{"residues", residues},
                      {"molecules", molecules},
                      {"score_batch_mols_per_s", best},
                      {"repurpose_scan_s", scan_s},
                      {"scanned", scan.scanned}};
    if (!g.out.empty()) {
      bench::write_json(g.out, result);
      write_manifest(g.out, "bench-throughput", g,
                     {{"scorer", scorer}, {"ligands", ligands}, {"residues", residues}, {"molecules", molecules},
                      {"repeats", repeats}},
                     argv);
    }
    std::cout << result.dump(1) << '\n';
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-based ligand design toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "seed for every random choice");
  app.add_option("--config", g.config_path, "JSON config; flags override its keys")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output file or directory");
  auto* threads_opt = app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1, 256));
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.fallthrough();

  MakeDataset make_dataset;
  TrainScorer train_scorer;
  TrainCom train_com;
  Generate generate;
  Generate generate_po;
  generate_po.po = true;
  Repurpose repurpose;
  ExpressivityCheck expressivity_check;
  Eval eval;
  Throughput throughput;

  std::vector<std::pair<CLI::App*, std::function<void()>>> commands;
  const std::vector<std::string> args(argv, argv + argc);
  auto reg = [&](const char* name, const char* help, auto& cmd) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    cmd.add(*sub);
    commands.emplace_back(sub, [&cmd, &g, &args] { cmd.run(g, args); });
  };
  reg("make-dataset", "synthesize pockets and docking-labelled records", make_dataset);
  reg("train-scorer", "train the affinity scorer", train_scorer);
  reg("train-com", "train the centre-of-mass model", train_com);
  reg("generate", "sample candidates for pockets", generate);
  reg("generate-po", "sample candidates with property optimization", generate_po);
  reg("repurpose", "scan a library for window hits", repurpose);
  reg("expressivity-check", "compare two graphs under colour refinement", expressivity_check);
  reg("eval", "dock candidates and report metrics", eval);
  reg("bench-throughput", "measure scoring throughput", throughput);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  try {
    if (!g.config_path.empty()) {
      g.config = bench::read_json(g.config_path);
      if (!g.config.is_object()) throw ValidationError("config must be a JSON object");
    }
    resolve(g.seed, seed_opt, g.config, "seed");
    resolve(g.threads, threads_opt, g.config, "threads");
    if (g.threads < 1) throw ValidationError("--threads must be at least 1");
    for (auto& [sub, run] : commands) {
      if (sub->parsed()) run();
    }
  } catch (const NumericError& e) {
    spdlog::error("numeric failure: {}", e.what());
    return 3;
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 1;
  }
  return 0;
}
