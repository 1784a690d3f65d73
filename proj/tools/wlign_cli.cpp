// Command-line front end. Library modules stay pure; this file owns file IO,
// flag parsing, the parallel executor degree, and process exit codes:
//   0 success (certify: all PASS), 1 certify found failures, 2 certify only
//   skipped, 64 usage errors, 70 internal invariant violations, 74 bad input.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wlign/certify.hpp"
#include "wlign/graph.hpp"
#include "wlign/ign.hpp"
#include "wlign/logic.hpp"
#include "wlign/patterns.hpp"
#include "wlign/rational.hpp"
#include "wlign/wl.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;
constexpr int kExitData = 74;

struct GlobalOpts {
  std::string mode = "rational";
  int jobs = 1;
  std::uint64_t seed = 7;
  std::string out;
};

wlign::ColouredGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return wlign::graph_from_string(buf.str());
}

std::string load_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const nlohmann::json& doc, const std::string& out) {
  std::string text = doc.dump(2);
  text.push_back('\n');
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::invalid_argument("cannot write output file: " + out);
  f << text;
}

nlohmann::json load_json(const std::string& path) {
  nlohmann::json doc = nlohmann::json::parse(load_text(path), nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("invalid JSON in " + path);
  return doc;
}

// "x1=0,x2=3" -> zero-based variable index -> vertex
std::map<int, int> parse_assignment(const std::string& text) {
  std::map<int, int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || item.size() < 4 || item[0] != 'x')
      throw std::invalid_argument("bad assignment entry: " + item);
    int var = 0, vertex = 0;
    try {
      var = std::stoi(item.substr(1, eq - 1));
      vertex = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad assignment entry: " + item);
    }
    if (var < 1) throw std::invalid_argument("variables are numbered from x1");
    out[var] = vertex;
  }
  return out;
}

// ---- wl ----

int cmd_wl_run(const GlobalOpts& g, const std::string& graph_path, int k,
               std::optional<std::uint64_t> rounds) {
  auto graph = load_graph(graph_path);
  auto hist = wlign::wl_run(graph, k, rounds, g.jobs);
  emit(wlign::history_to_json(hist), g.out);
  return 0;
}

int cmd_wl_distinguish(const GlobalOpts& g, const std::string& a_path, const std::string& b_path,
                       int k, std::optional<std::uint64_t> rounds) {
  auto ga = load_graph(a_path);
  auto gb = load_graph(b_path);
  nlohmann::json doc;
  if (ga.n != gb.n) {
    doc["equivalent_at"] = nlohmann::json::array({false});
    doc["stable_round_g"] = nlohmann::json();
    doc["stable_round_h"] = nlohmann::json();
    doc["note"] = "vertex counts differ";
  } else {
    auto pair = wlign::wl_run_joint(ga, gb, k, rounds, g.jobs);
    doc["equivalent_at"] = wlign::wl_equivalence_profile(pair);
    doc["stable_round_g"] = pair.g.stable_round;
    doc["stable_round_h"] = pair.h.stable_round;
  }
  emit(doc, g.out);
  return 0;
}

// ---- ign ----

template <class S>
nlohmann::json run_model_on(const wlign::IgnModel<S>& model, const wlign::ColouredGraph& graph,
                            std::optional<int> trunc, int jobs, wlign::NumericMode mode) {
  auto enc = wlign::encode<S>(graph, model.k, jobs);
  nlohmann::json doc;
  doc["k"] = model.k;
  doc["input_channels"] = enc.channels;
  if (trunc) {
    auto f = wlign::forward_trunc(model, enc, *trunc, jobs);
    doc["truncation"] = *trunc;
    doc["tensor"] = wlign::tensor_to_json(f, mode);
  } else {
    auto out = wlign::forward(model, enc, jobs);
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& v : out) vals.push_back(wlign::scalar_to_string<S>(v));
    doc["output"] = vals;
  }
  return doc;
}

int cmd_ign_run(const GlobalOpts& g, const std::string& model_path, const std::string& graph_path,
                std::optional<int> trunc) {
  auto doc = load_json(model_path);
  auto graph = load_graph(graph_path);
  nlohmann::json out;
  wlign::NumericMode mode = wlign::parse_mode(g.mode);
  if (mode == wlign::NumericMode::rational) {
    out = run_model_on(wlign::model_from_json<wlign::Rational>(doc), graph, trunc, g.jobs, mode);
  } else {
    out = run_model_on(wlign::model_from_json<double>(doc), graph, trunc, g.jobs, mode);
  }
  out["mode"] = g.mode;
  emit(out, g.out);
  return 0;
}

template <class S>
nlohmann::json distinguish_with(const wlign::IgnModel<S>& model, const wlign::ColouredGraph& ga,
                                const wlign::ColouredGraph& gb, int jobs) {
  auto enc = wlign::encode_pair<S>(ga, gb, model.k, jobs);
  nlohmann::json doc;
  auto out_g = wlign::forward(model, enc.g, jobs);
  auto out_h = wlign::forward(model, enc.h, jobs);
  doc["outputs_equal"] = out_g == out_h;
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t <= model.depth(); ++t)
    rows.push_back(wlign::ign_equivalent_at(model, enc.g, enc.h, t, jobs));
  doc["rows_equal_at"] = rows;
  nlohmann::json og = nlohmann::json::array(), oh = nlohmann::json::array();
  for (const auto& v : out_g) og.push_back(wlign::scalar_to_string<S>(v));
  for (const auto& v : out_h) oh.push_back(wlign::scalar_to_string<S>(v));
  doc["output_g"] = og;
  doc["output_h"] = oh;
  return doc;
}

int cmd_ign_distinguish(const GlobalOpts& g, const std::string& model_path,
                        const std::string& a_path, const std::string& b_path) {
  auto doc = load_json(model_path);
  auto ga = load_graph(a_path);
  auto gb = load_graph(b_path);
  if (ga.n != gb.n) throw std::invalid_argument("graphs must have equal vertex counts");
  nlohmann::json out;
  if (wlign::parse_mode(g.mode) == wlign::NumericMode::rational) {
    out = distinguish_with(wlign::model_from_json<wlign::Rational>(doc), ga, gb, g.jobs);
  } else {
    out = distinguish_with(wlign::model_from_json<double>(doc), ga, gb, g.jobs);
  }
  out["mode"] = g.mode;
  emit(out, g.out);
  return 0;
}

int cmd_ign_sample(const GlobalOpts& g, int k, const std::string& graph_path, int in_channels,
                   int depth, int channels) {
  int s0 = in_channels;
  if (!graph_path.empty()) {
    auto graph = load_graph(graph_path);
    s0 = wlign::encode<wlign::Rational>(graph, k, g.jobs).channels;
  }
  if (s0 < 1) throw std::invalid_argument("pass --graph or a positive --in-channels");
  wlign::ModelShape shape;
  shape.k = k;
  shape.channels.push_back(s0);
  for (int i = 0; i < depth; ++i) shape.channels.push_back(channels);
  shape.invariant_out = channels;
  shape.mlp_dims = {channels, 1};
  auto model = wlign::sample_model(shape, g.seed);
  emit(wlign::model_to_json(model, wlign::NumericMode::rational), g.out);
  return 0;
}

// ---- patterns ----

int cmd_patterns_enum(const GlobalOpts& g, int arity, int k) {
  const auto& uni = wlign::patterns(arity);
  nlohmann::json doc;
  doc["arity"] = arity;
  doc["count"] = uni.size();
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t id = 0; id < uni.size(); ++id) {
    const auto& p = uni.list()[id];
    nlohmann::json pj;
    pj["id"] = id;
    pj["rgs"] = p.rgs;
    pj["blocks"] = p.blocks();
    if (k > 0 && arity == 2 * k) {
      nlohmann::json classes = nlohmann::json::array();
      for (const auto& c : wlign::classify(p, k)) {
        nlohmann::json cj;
        cj["kind"] = wlign::class_kind_name(c.kind);
        cj["rep"] = c.rep;
        cj["first_half"] = c.first_half;
        cj["second_half"] = c.second_half;
        classes.push_back(cj);
      }
      pj["classes"] = classes;
      pj["good"] = wlign::is_good(p, k);
    }
    list.push_back(pj);
  }
  doc["patterns"] = list;
  if (k > 0) doc["k"] = k;
  emit(doc, g.out);
  return 0;
}

// ---- logic ----

int cmd_logic_eval(const GlobalOpts& g, const std::string& graph_path,
                   const std::string& formula_path, const std::string& assign) {
  auto graph = load_graph(graph_path);
  auto f = wlign::parse_formula(load_text(formula_path));
  auto vars = wlign::free_vars(f);
  auto given = parse_assignment(assign);
  int width = f->max_var;
  for (const auto& [var, vertex] : given) width = std::max(width, var);
  std::vector<int> alpha(width, 0);
  for (const auto& [var, vertex] : given) alpha[var - 1] = vertex;
  for (int var : vars)
    if (!given.count(var))
      throw std::invalid_argument("free variable x" + std::to_string(var) + " is unassigned");
  nlohmann::json doc;
  doc["value"] = wlign::evaluate(graph, f, alpha);
  doc["quantifier_rank"] = wlign::quantifier_rank(f);
  nlohmann::json fv = nlohmann::json::array();
  for (int var : vars) fv.push_back("x" + std::to_string(var));
  doc["free_variables"] = fv;
  emit(doc, g.out);
  return 0;
}

int cmd_logic_agree(const GlobalOpts& g, const std::string& a_path, const std::string& b_path,
                    int k, int qr, int samples) {
  auto ga = load_graph(a_path);
  auto gb = load_graph(b_path);
  auto alphabet = wlign::make_alphabet(ga, gb);
  std::vector<std::string> labels;
  for (const auto& [label, id] : alphabet.id_of) labels.push_back(label);
  std::vector<wlign::FormulaPtr> sentences;
  int degenerate = 0;
  for (int i = 0; i < samples; ++i) {
    auto s = wlign::sample_sentence(k, qr, labels, g.seed + i);
    if (s.degenerate) ++degenerate;
    sentences.push_back(s.formula);
  }
  auto rep = wlign::agree_on(ga, gb, sentences, k);
  nlohmann::json doc;
  doc["k"] = k;
  doc["max_quantifier_rank"] = qr;
  doc["samples"] = rep.sentences;
  doc["degenerate_samples"] = degenerate;
  doc["disagreements"] = rep.disagreements;
  doc["counterexamples"] = rep.counterexamples;
  emit(doc, g.out);
  return 0;
}

// ---- certify ----

struct CertifyOpts {
  std::string suite = "all";
  int models = 100;
  int t = -1;      // feature/permute round override; -1 = per-suite default
  int n_max = -1;  // decomposition bound override
  bool timing = false;
};

// Model shapes stay small enough for exact arithmetic at desk scale.
wlign::SuiteModelParams suite_params(int k) {
  wlign::SuiteModelParams p;
  if (k >= 3) {
    p.max_depth = 2;
    p.max_channels = 4;
  }
  return p;
}

int cmd_certify_run(const GlobalOpts& g, const CertifyOpts& c, const std::string& a_path,
                    const std::string& b_path, int k) {
  if (wlign::parse_mode(g.mode) != wlign::NumericMode::rational)
    throw CLI::ValidationError("--mode", "certification runs in rational mode only");
  auto ga = load_graph(a_path);
  auto gb = load_graph(b_path);

  struct Timed {
    wlign::CertificationReport rep;
    std::int64_t wall_ms = 0;
  };
  std::vector<Timed> reports;
  auto run = [&](auto&& fn) {
    auto start = std::chrono::steady_clock::now();
    wlign::CertificationReport rep = fn();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    reports.push_back({std::move(rep), ms});
  };

  bool all = c.suite == "all";
  if (all || c.suite == "key-lemma") {
    for (int m = 1; m <= 3; ++m)
      run([&] { return wlign::check_key_lemma(ga, gb, k, m, g.jobs); });
  }
  if (all || c.suite == "decomposition") {
    int n_max = c.n_max > 0 ? c.n_max : (k == 2 ? 5 : 4);
    run([&] { return wlign::check_observation_decomposition(n_max, k); });
  }
  if (all || c.suite == "permute") {
    int t_hi = c.t >= 0 ? c.t : 4;
    for (int t = 0; t <= t_hi; ++t)
      run([&] { return wlign::check_observation_permute(ga, gb, k, t, 720, g.jobs); });
  }
  if (all || c.suite == "feature") {
    int count = std::min(c.models, 20);
    auto enc = wlign::encode_pair<wlign::Rational>(ga, gb, k, g.jobs);
    for (int i = 0; i < count; ++i) {
      auto model = wlign::sample_suite_model(k, enc.channels, g.seed, i, suite_params(k));
      int t = c.t >= 0 ? c.t : (model.depth() + 1) * (k - 1) - 1;
      run([&] { return wlign::check_lemma_feature_implication(ga, gb, k, model, t, g.jobs); });
    }
  }
  if (all || c.suite == "theorem") {
    auto enc = wlign::encode_pair<wlign::Rational>(ga, gb, k, g.jobs);
    std::vector<wlign::IgnModel<wlign::Rational>> models;
    for (int i = 0; i < c.models; ++i)
      models.push_back(wlign::sample_suite_model(k, enc.channels, g.seed, i, suite_params(k)));
    run([&] { return wlign::check_theorem(ga, gb, k, models, g.jobs); });
  }
  if (all) {
    int t = c.t >= 0 ? c.t : 2 * (k - 1);
    run([&] { return wlign::check_unused_constant_case(ga, gb, k, t, 5, g.jobs); });
  }
  if (reports.empty()) throw CLI::ValidationError("--suite", "unknown suite: " + c.suite);

  // The proof chain runs anchor equality -> feature-row equality -> output
  // equality; a failure upstream of a pass can only mean the harness itself
  // is wrong, so it is reported as an internal error, not a result.
  auto status_of = [&](const std::string& experiment) {
    std::string worst;
    for (const auto& r : reports) {
      if (r.rep.experiment != experiment) continue;
      std::string s = r.rep.status();
      if (s == "FAIL") return s;
      if (worst.empty() || s == "PASS") worst = s;
    }
    return worst;
  };
  std::string key = status_of("key_lemma"), feat = status_of("feature_implication"),
              thm = status_of("theorem");
  if (key == "FAIL" && (feat == "PASS" || thm == "PASS"))
    throw std::logic_error("anchor equality failed while a downstream stage passed");
  if (feat == "FAIL" && thm == "PASS")
    throw std::logic_error("feature-row equality failed while outputs still matched");

  nlohmann::json doc;
  doc["suite"] = c.suite;
  doc["k"] = k;
  doc["seed"] = g.seed;
  doc["mode"] = g.mode;
  nlohmann::json arr = nlohmann::json::array();
  bool any_fail = false, any_pass = false;
  for (const auto& r : reports) {
    arr.push_back(wlign::report_to_json(
        r.rep, c.timing ? std::optional<std::int64_t>(r.wall_ms) : std::nullopt));
    if (r.rep.failed()) any_fail = true;
    if (!r.rep.skipped() && !r.rep.failed()) any_pass = true;
  }
  doc["reports"] = arr;
  doc["status"] = any_fail ? "FAIL" : (any_pass ? "PASS" : "SKIP");
  emit(doc, g.out);
  return any_fail ? 1 : (any_pass ? 0 : 2);
}

// ---- corpus ----

int cmd_corpus_list(const GlobalOpts& g) {
  nlohmann::json doc;
  doc["pairs"] = wlign::corpus_names();
  emit(doc, g.out);
  return 0;
}

int cmd_corpus_emit(const std::string& name, const std::string& out_dir) {
  auto [ga, gb] = wlign::corpus(name);
  std::filesystem::create_directories(out_dir);
  emit(wlign::graph_to_json(ga), (std::filesystem::path(out_dir) / "g.json").string());
  emit(wlign::graph_to_json(gb), (std::filesystem::path(out_dir) / "h.json").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tuple-refinement and equivariant-network laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  // --h names the second input graph, so help answers to --help only.
  app.set_help_flag("--help", "Print help");
  auto sub = [](CLI::App* parent, const std::string& name, const std::string& desc) {
    auto* s = parent->add_subcommand(name, desc);
    s->set_help_flag("--help", "Print help");
    return s;
  };

  GlobalOpts g;
  app.add_option("--mode", g.mode, "Numeric mode: rational or float")
      ->check(CLI::IsMember({"rational", "float"}))
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads; 0 picks the hardware count")
      ->check(CLI::Range(0, 1024))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for every sampled object")->capture_default_str();
  app.add_option("--out", g.out, "Write the JSON result here instead of stdout");

  // wl
  auto* wl = sub(&app, "wl", "Tuple colour refinement");
  std::string wl_graph, wl_a, wl_b;
  int wl_k = 2;
  std::uint64_t wl_rounds = 0;
  auto* wl_run_cmd = sub(wl, "run", "Refine one graph and dump the history");
  wl_run_cmd->add_option("--graph", wl_graph, "Graph JSON file")->required();
  wl_run_cmd->add_option("-k,--k", wl_k, "Tuple dimension")->required()->check(CLI::Range(2, 6));
  wl_run_cmd->add_option("--rounds", wl_rounds, "Cap on refinement rounds (default n^k)");
  auto* wl_dis = sub(wl, "distinguish", "Compare two graphs round by round");
  wl_dis->add_option("--g", wl_a, "First graph JSON file")->required();
  wl_dis->add_option("--h", wl_b, "Second graph JSON file")->required();
  wl_dis->add_option("-k,--k", wl_k, "Tuple dimension")->required()->check(CLI::Range(2, 6));
  wl_dis->add_option("--rounds", wl_rounds, "Cap on refinement rounds (default n^k)");

  // ign
  auto* ign = sub(&app, "ign", "Equivariant network runs");
  std::string ign_model, ign_graph, ign_a, ign_b;
  int ign_trunc = -1, ign_k = 2, ign_depth = 2, ign_channels = 4, ign_in_channels = 0;
  auto* ign_run_cmd = sub(ign, "run", "Apply a model to one graph");
  ign_run_cmd->add_option("--model", ign_model, "Model JSON file")->required();
  ign_run_cmd->add_option("--graph", ign_graph, "Graph JSON file")->required();
  ign_run_cmd->add_option("--trunc", ign_trunc,
                          "Stop after this many equivariant layers and dump the tensor");
  auto* ign_dis = sub(ign, "distinguish", "Compare model outputs on two graphs");
  ign_dis->add_option("--model", ign_model, "Model JSON file")->required();
  ign_dis->add_option("--g", ign_a, "First graph JSON file")->required();
  ign_dis->add_option("--h", ign_b, "Second graph JSON file")->required();
  auto* ign_sample = sub(ign, "sample", "Draw a small seeded model as JSON");
  ign_sample->add_option("-k,--k", ign_k, "Tuple dimension")->required()->check(CLI::Range(2, 5));
  ign_sample->add_option("--graph", ign_graph, "Take input channels from this graph's encoding");
  ign_sample->add_option("--in-channels", ign_in_channels, "Input channels when no graph given");
  ign_sample->add_option("--depth", ign_depth, "Equivariant layers")->capture_default_str();
  ign_sample->add_option("--channels", ign_channels, "Hidden width")->capture_default_str();

  // patterns
  auto* pats = sub(&app, "patterns", "Equality-pattern algebra");
  int pat_arity = 4, pat_k = 0;
  auto* pat_enum = sub(pats, "enum", "List all patterns of one arity");
  pat_enum->add_option("--arity", pat_arity, "Pattern arity")
      ->required()
      ->check(CLI::Range(1, static_cast<int>(wlign::kMaxPatternArity)));
  pat_enum->add_option("-k,--k", pat_k, "Annotate classes for this tuple dimension (arity = 2k)");

  // logic
  auto* logic = sub(&app, "logic", "Counting-logic sentences");
  std::string lg_graph, lg_formula, lg_assign, lg_a, lg_b;
  int lg_k = 2, lg_qr = 4, lg_samples = 500;
  auto* lg_eval = sub(logic, "eval", "Evaluate a formula on a graph");
  lg_eval->add_option("--graph", lg_graph, "Graph JSON file")->required();
  lg_eval->add_option("--formula", lg_formula, "Formula file (s-expression)")->required();
  lg_eval->add_option("--assign", lg_assign, "Assignment like x1=0,x2=3");
  auto* lg_agree = sub(logic, "agree", "Sample sentences and compare two graphs");
  lg_agree->add_option("--g", lg_a, "First graph JSON file")->required();
  lg_agree->add_option("--h", lg_b, "Second graph JSON file")->required();
  lg_agree->add_option("-k,--k", lg_k, "Variable supply")->required()->check(CLI::Range(1, 5));
  lg_agree->add_option("--qr", lg_qr, "Quantifier rank bound")->capture_default_str();
  lg_agree->add_option("--samples", lg_samples, "Sentences to draw")->capture_default_str();

  // certify
  auto* certify = sub(&app, "certify", "Certification suites");
  CertifyOpts copt;
  std::string ct_a, ct_b;
  int ct_k = 2;
  auto* ct_run = sub(certify, "run", "Run a suite and emit a report");
  ct_run->add_option("--suite", copt.suite, "all, key-lemma, decomposition, permute, feature, theorem")
      ->check(CLI::IsMember({"all", "key-lemma", "decomposition", "permute", "feature", "theorem"}))
      ->capture_default_str();
  ct_run->add_option("--g", ct_a, "First graph JSON file")->required();
  ct_run->add_option("--h", ct_b, "Second graph JSON file")->required();
  ct_run->add_option("-k,--k", ct_k, "Tuple dimension")->required()->check(CLI::Range(2, 4));
  ct_run->add_option("--models", copt.models, "Sampled models for theorem and feature suites")
      ->capture_default_str();
  ct_run->add_option("--t", copt.t, "Round override for permute and feature suites");
  ct_run->add_option("--n-max", copt.n_max, "Vertex-count bound for the decomposition suite");
  ct_run->add_flag("--timing", copt.timing, "Attach wall-clock times (breaks byte reproducibility)");

  // corpus
  auto* corpus = sub(&app, "corpus", "Built-in graph pairs");
  std::string cp_name, cp_dir = ".";
  sub(corpus, "list", "Names of the built-in pairs");
  auto* cp_emit = sub(corpus, "emit", "Write one pair as g.json and h.json");
  cp_emit->add_option("name", cp_name, "Pair name from `corpus list`")->required();
  cp_emit->add_option("--out-dir", cp_dir, "Target directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    std::optional<std::uint64_t> rounds =
        wl_rounds > 0 ? std::optional<std::uint64_t>(wl_rounds) : std::nullopt;
    std::optional<int> trunc = ign_trunc >= 0 ? std::optional<int>(ign_trunc) : std::nullopt;
    if (g.jobs == 0) g.jobs = static_cast<int>(wlign::resolve_jobs(0));

    if (wl_run_cmd->parsed()) return cmd_wl_run(g, wl_graph, wl_k, rounds);
    if (wl_dis->parsed()) return cmd_wl_distinguish(g, wl_a, wl_b, wl_k, rounds);
    if (ign_run_cmd->parsed()) return cmd_ign_run(g, ign_model, ign_graph, trunc);
    if (ign_dis->parsed()) return cmd_ign_distinguish(g, ign_model, ign_a, ign_b);
    if (ign_sample->parsed()) return cmd_ign_sample(g, ign_k, ign_graph, ign_in_channels,
                                                    ign_depth, ign_channels);
    if (pat_enum->parsed()) return cmd_patterns_enum(g, pat_arity, pat_k);
    if (lg_eval->parsed()) return cmd_logic_eval(g, lg_graph, lg_formula, lg_assign);
    if (lg_agree->parsed()) return cmd_logic_agree(g, lg_a, lg_b, lg_k, lg_qr, lg_samples);
    if (ct_run->parsed()) return cmd_certify_run(g, copt, ct_a, ct_b, ct_k);
    if (corpus->got_subcommand("list")) return cmd_corpus_list(g);
    if (cp_emit->parsed()) return cmd_corpus_emit(cp_name, cp_dir);
    std::cerr << "missing sub-command; see --help\n";
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
