#include "symlog/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "symlog/rng.hpp"

namespace symlog {

// --------------------------------------------------------------------------
// GenConfig
// --------------------------------------------------------------------------

json GenConfig::to_json() const {
  json j;
  j["seed"] = seed;
  json counts_json = json::array();
  for (const auto& c : counts) {
    counts_json.push_back({{"domain", c.domain},
                           {"logic", to_string(c.logic)},
                           {"depth", c.depth},
                           {"count", c.count}});
  }
  j["counts"] = counts_json;
  j["label_ratios"] = {{"True", true_ratio}, {"False", false_ratio}, {"Unknown", unknown_ratio}};
  j["truth_eval_ratio"] = truth_eval_ratio;
  j["heuristic_rate"] = heuristic_rate;
  json lex = json::object();
  for (const auto& [d, p] : lexicon_paths) lex[d] = p;
  j["lexicons"] = lex;
  j["filter"] = {{"lexical_threshold", filter.lexical_threshold},
                 {"plausibility_threshold", filter.plausibility_threshold}};
  json plaus = json::object();
  plaus["mode"] = plausibility_mode;
  if (plausibility_mode == "command") plaus["command"] = plausibility_command;
  if (plausibility_mode == "http") {
    plaus["host"] = plausibility_host;
    plaus["port"] = plausibility_port;
    plaus["path"] = plausibility_path;
  }
  plaus["timeout_ms"] = plausibility_timeout_ms;
  j["plausibility"] = plaus;
  j["oracle"] = {{"max_pl_atoms", oracle.max_pl_atoms},
                 {"max_fol_domain", oracle.max_fol_domain},
                 {"max_search_nodes", oracle.max_search_nodes},
                 {"max_ground_instances", oracle.max_ground_instances}};
  j["context_length"] = {{"min", context_min}, {"max", context_max}};
  j["max_attempts_per_instance"] = max_attempts_per_instance;
  json weights = json::object();
  for (const auto& [r, w] : rule_weights) weights[r] = w;
  j["rule_weights"] = weights;
  return j;
}

GenConfig GenConfig::from_json(const json& j) {
  GenConfig c;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jc : j.at("counts")) {
      CountSpec s;
      s.domain = jc.at("domain").get<std::string>();
      s.logic = logic_class_from_string(jc.at("logic").get<std::string>());
      s.depth = jc.at("depth").get<int>();
      s.count = jc.at("count").get<int>();
      if (s.depth < 2 || s.depth > 9) {
        throw ConfigError("counts: depth must be within [2, 9], got " + std::to_string(s.depth));
      }
      if (s.count < 0) throw ConfigError("counts: count must be non-negative");
      c.counts.push_back(s);
    }
    if (j.contains("label_ratios")) {
      const json& r = j.at("label_ratios");
      c.true_ratio = r.at("True").get<double>();
      c.false_ratio = r.at("False").get<double>();
      c.unknown_ratio = r.at("Unknown").get<double>();
    }
    c.truth_eval_ratio = j.value("truth_eval_ratio", c.truth_eval_ratio);
    c.heuristic_rate = j.value("heuristic_rate", c.heuristic_rate);
    if (j.contains("lexicons")) {
      for (const auto& [d, p] : j.at("lexicons").items()) {
        c.lexicon_paths[d] = p.get<std::string>();
      }
    }
    if (j.contains("filter")) {
      c.filter.lexical_threshold = j.at("filter").value("lexical_threshold", 0.5);
      c.filter.plausibility_threshold = j.at("filter").value("plausibility_threshold", 0.5);
    }
    if (j.contains("plausibility")) {
      const json& p = j.at("plausibility");
      c.plausibility_mode = p.value("mode", std::string("off"));
      c.plausibility_command = p.value("command", std::string());
      c.plausibility_host = p.value("host", std::string("127.0.0.1"));
      c.plausibility_port = p.value("port", 0);
      c.plausibility_path = p.value("path", std::string("/score"));
      c.plausibility_timeout_ms = p.value("timeout_ms", 5000);
    }
    if (j.contains("oracle")) {
      const json& o = j.at("oracle");
      c.oracle.max_pl_atoms = o.value("max_pl_atoms", c.oracle.max_pl_atoms);
      c.oracle.max_fol_domain = o.value("max_fol_domain", c.oracle.max_fol_domain);
      c.oracle.max_search_nodes = o.value("max_search_nodes", c.oracle.max_search_nodes);
      c.oracle.max_ground_instances =
          o.value("max_ground_instances", c.oracle.max_ground_instances);
    }
    if (j.contains("context_length")) {
      c.context_min = j.at("context_length").value("min", c.context_min);
      c.context_max = j.at("context_length").value("max", c.context_max);
    }
    c.max_attempts_per_instance = j.value("max_attempts_per_instance", 60);
    if (j.contains("rule_weights")) {
      for (const auto& [r, w] : j.at("rule_weights").items()) {
        c.rule_weights[r] = w.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }

  double ratio_sum = c.true_ratio + c.false_ratio + c.unknown_ratio;
  if (std::abs(ratio_sum - 1.0) > 1e-9) {
    throw ConfigError("label_ratios must sum to 1, got " + std::to_string(ratio_sum));
  }
  for (double t : {c.filter.lexical_threshold, c.filter.plausibility_threshold}) {
    if (t < 0.0 || t > 1.0) throw ConfigError("filter thresholds must lie in [0, 1]");
  }
  if (c.truth_eval_ratio < 0.0 || c.truth_eval_ratio > 1.0) {
    throw ConfigError("truth_eval_ratio must lie in [0, 1]");
  }
  if (c.heuristic_rate < 0.0 || c.heuristic_rate > 1.0) {
    throw ConfigError("heuristic_rate must lie in [0, 1]");
  }
  if (c.context_min < 0 || c.context_max < c.context_min) {
    throw ConfigError("context_length bounds are inconsistent");
  }
  return c;
}

std::uint64_t config_hash(const GenConfig& config) {
  return fnv1a(config.to_json().dump());
}

// --------------------------------------------------------------------------
// Generation
// --------------------------------------------------------------------------

namespace {

struct Task {
  CountSpec cell;
  int index = 0;            // within the cell
  QuestionType qtype = QuestionType::TruthEval;
  std::string label;        // truth-eval gold label quota
  std::string id;
};

std::string make_id(const CountSpec& cell, int index) {
  std::ostringstream os;
  os << cell.domain << "-" << to_string(cell.logic) << "-d" << cell.depth << "-"
     << std::setw(4) << std::setfill('0') << index;
  return os.str();
}

// Deterministic quota schedule: a repeating 20-slot pattern per ratio set
// keeps realized shares within rounding distance of the configured ratios.
std::vector<std::string> label_pattern(double t, double f, double u) {
  const int slots = 20;
  int nt = static_cast<int>(std::floor(t * slots));
  int nf = static_cast<int>(std::floor(f * slots));
  int nu = static_cast<int>(std::floor(u * slots));
  // Largest remainder for the leftover slots.
  while (nt + nf + nu < slots) {
    double rt = t * slots - nt, rf = f * slots - nf, ru = u * slots - nu;
    if (rt >= rf && rt >= ru) {
      ++nt;
    } else if (rf >= ru) {
      ++nf;
    } else {
      ++nu;
    }
  }
  std::vector<std::string> out;
  for (int i = 0; i < nt; ++i) out.push_back("True");
  for (int i = 0; i < nf; ++i) out.push_back("False");
  for (int i = 0; i < nu; ++i) out.push_back("Unknown");
  return out;
}

struct ScorerBundle {
  std::unique_ptr<PlausibilityScorer> transport;
  std::unique_ptr<CachingScorer> cache;

  PlausibilityScorer* get() { return cache ? cache.get() : nullptr; }
};

ScorerBundle make_scorer(const GenConfig& config) {
  ScorerBundle b;
  if (config.plausibility_mode == "off") return b;
  if (config.plausibility_mode == "command") {
    b.transport = std::make_unique<SubprocessScorer>(config.plausibility_command,
                                                     config.plausibility_timeout_ms);
  } else if (config.plausibility_mode == "http") {
    b.transport = std::make_unique<HttpScorer>(config.plausibility_host, config.plausibility_port,
                                               config.plausibility_path,
                                               config.plausibility_timeout_ms);
  } else {
    throw ConfigError("plausibility.mode must be off | command | http");
  }
  b.cache = std::make_unique<CachingScorer>(b.transport.get());
  return b;
}

struct TaskResult {
  std::string id;
  json row;
  std::map<std::string, int> rejections;
  std::map<std::string, int> rules;
  std::string error;  // non-empty = generation failed
};

}  // namespace

GenStats generate_dataset(const GenConfig& config, const std::string& out_path) {
  // Load lexicons up front; every referenced domain must resolve.
  std::map<std::string, Lexicon> lexicons;
  for (const auto& cell : config.counts) {
    if (lexicons.count(cell.domain)) continue;
    auto it = config.lexicon_paths.find(cell.domain);
    if (it == config.lexicon_paths.end()) {
      throw ConfigError("no lexicon configured for domain '" + cell.domain + "'");
    }
    lexicons.emplace(cell.domain, load_lexicon(it->second));
  }

  std::vector<Task> tasks;
  {
    std::vector<std::string> labels =
        label_pattern(config.true_ratio, config.false_ratio, config.unknown_ratio);
    // Question-type quota: a 20-slot repeating pattern like the labels.
    const int slots = 20;
    int n_te = static_cast<int>(std::lround(config.truth_eval_ratio * slots));
    int truth_eval_counter = 0;
    int overall = 0;
    for (const auto& cell : config.counts) {
      for (int k = 0; k < cell.count; ++k) {
        Task t;
        t.cell = cell;
        t.index = k;
        t.id = make_id(cell, k);
        t.qtype = (overall % slots) < n_te ? QuestionType::TruthEval
                                           : QuestionType::MultipleChoice;
        if (t.qtype == QuestionType::TruthEval) {
          t.label = labels[static_cast<std::size_t>(truth_eval_counter % labels.size())];
          ++truth_eval_counter;
        }
        ++overall;
        tasks.push_back(std::move(t));
      }
    }
  }

  ScorerBundle scorer = make_scorer(config);

  GroundingOptions gopts;
  gopts.context_min = config.context_min;
  gopts.context_max = config.context_max;
  gopts.oracle = config.oracle;

  ChainConfig chain_cfg;
  chain_cfg.heuristic_rate = config.heuristic_rate;
  chain_cfg.rule_weights = config.rule_weights;

  std::vector<TaskResult> results(tasks.size());
  const bool parallel_safe = config.plausibility_mode == "off";

  auto run_task = [&](std::size_t ti) {
    const Task& task = tasks[ti];
    TaskResult& res = results[ti];
    res.id = task.id;
    const Lexicon& lexicon = lexicons.at(task.cell.domain);
    for (int attempt = 0; attempt < config.max_attempts_per_instance; ++attempt) {
      std::uint64_t task_seed = mix_seed(
          config.seed, task.id + "#" + std::to_string(attempt));
      try {
        ReasoningChain chain =
            sample_chain(task.cell.depth, task.cell.logic, task_seed, chain_cfg);
        GroundedInstance inst = ground_chain(chain, lexicon, task_seed, gopts);
        inst.id = task.id;
        QuestionOptions qopts;
        qopts.true_ratio = config.true_ratio;
        qopts.false_ratio = config.false_ratio;
        qopts.unknown_ratio = config.unknown_ratio;
        qopts.forced_label = task.label;
        qopts.oracle = config.oracle;
        generate_question(inst, lexicon, task.qtype, task_seed, qopts);

        FilterDecision fd = filter_instance(inst, scorer.get(), config.filter);
        if (fd.status == FilterDecision::Status::Rejected) {
          res.rejections[fd.reasons.empty() ? "filtered" : fd.reasons.front().check] += 1;
          continue;
        }
        if (fd.status == FilterDecision::Status::Undecided) {
          res.rejections["scorer_failure"] += 1;
          continue;
        }
        for (const auto& s : inst.chain.steps) res.rules[s.rule_id] += 1;
        res.row = instance_to_json(inst);
        return;
      } catch (const GroundingError& e) {
        res.rejections["grounding"] += 1;
        (void)e;
      } catch (const CompositionError& e) {
        res.rejections["composition"] += 1;
        (void)e;
      }
    }
    res.error = "could not generate an accepted instance for " + task.id + " within " +
                std::to_string(config.max_attempts_per_instance) + " attempts";
  };

  if (parallel_safe) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
  } else {
    // Scorer transports are single-channel; keep instance order serialized.
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
  }

  GenStats stats;
  stats.requested = static_cast<int>(tasks.size());
  std::vector<const TaskResult*> ordered;
  for (const auto& r : results) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const TaskResult* a, const TaskResult* b) { return a->id < b->id; });

  for (const auto* r : ordered) {
    if (!r->error.empty()) {
      throw CapExceededError(r->error + " (rejection rate too high)");
    }
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write " + out_path);
  for (const auto* r : ordered) {
    out << r->row.dump() << "\n";
    stats.accepted += 1;
    for (const auto& [k, v] : r->rejections) stats.rejections[k] += v;
    for (const auto& [k, v] : r->rules) stats.rule_histogram[k] += v;
    const json& row = r->row;
    if (row.at("question_type").get<std::string>() == "truth_eval") {
      stats.label_histogram[row.at("answer").get<std::string>()] += 1;
    } else {
      stats.label_histogram["multiple_choice"] += 1;
    }
  }
  out.close();

  json manifest;
  manifest["config"] = config.to_json();
  {
    std::ostringstream h;
    h << std::hex << std::setw(16) << std::setfill('0') << config_hash(config);
    manifest["config_hash"] = h.str();
  }
  manifest["requested"] = stats.requested;
  manifest["accepted"] = stats.accepted;
  json rej = json::object();
  for (const auto& [k, v] : stats.rejections) rej[k] = v;
  manifest["rejections"] = rej;
  json hist = json::object();
  for (const auto& [k, v] : stats.rule_histogram) hist[k] = v;
  manifest["rule_histogram"] = hist;
  json labels = json::object();
  for (const auto& [k, v] : stats.label_histogram) labels[k] = v;
  manifest["label_histogram"] = labels;
  if (scorer.cache) {
    json recorded = json::object();
    for (const auto& [k, v] : scorer.cache->recorded()) recorded[k] = v;
    manifest["scorer_responses"] = recorded;
  }
  std::ofstream mout(out_path + ".manifest.json", std::ios::binary);
  if (!mout) throw Error("cannot write manifest for " + out_path);
  mout << manifest.dump(2) << "\n";
  return stats;
}

GenStats generate_from_manifest(const std::string& manifest_path, const std::string& out_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ConfigError("cannot open manifest: " + manifest_path);
  json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid manifest JSON: ") + e.what());
  }
  GenConfig config = GenConfig::from_json(manifest.at("config"));
  return generate_dataset(config, out_path);
}

// --------------------------------------------------------------------------
// Reading JSONL
// --------------------------------------------------------------------------

std::vector<GroundedInstance> read_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<GroundedInstance> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(instance_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<Prediction> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(prediction_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Stats
// --------------------------------------------------------------------------

json dataset_stats(const std::string& instances_path) {
  std::vector<GroundedInstance> instances = read_instances(instances_path);
  json j;
  j["instances"] = instances.size();
  std::map<std::string, int> by_domain, by_logic, by_source, by_qtype, labels;
  std::map<int, int> by_depth;
  std::map<std::string, int> rules;
  long long len_sum = 0;
  int len_min = 0, len_max = 0;
  bool first = true;
  for (const auto& inst : instances) {
    by_domain[inst.domain] += 1;
    by_logic[to_string(inst.logic_type)] += 1;
    by_depth[inst.depth] += 1;
    std::string source = inst.image_ref.substr(0, inst.image_ref.find(':'));
    by_source[source.empty() ? "unknown" : source] += 1;
    by_qtype[to_string(inst.question.type)] += 1;
    if (inst.question.type == QuestionType::TruthEval) labels[inst.question.gold_label] += 1;
    int len = static_cast<int>(inst.context.size());
    len_sum += len;
    len_min = first ? len : std::min(len_min, len);
    len_max = first ? len : std::max(len_max, len);
    first = false;
    for (const auto& s : inst.chain.steps) rules[s.rule_id] += 1;
  }
  auto to_obj = [](const std::map<std::string, int>& m) {
    json out = json::object();
    for (const auto& [k, v] : m) out[k] = v;
    return out;
  };
  j["by_domain"] = to_obj(by_domain);
  j["by_logic"] = to_obj(by_logic);
  json depth = json::object();
  for (const auto& [d, v] : by_depth) depth[std::to_string(d)] = v;
  j["by_depth"] = depth;
  j["by_source"] = to_obj(by_source);
  j["by_question_type"] = to_obj(by_qtype);
  j["truth_eval_labels"] = to_obj(labels);
  json ctx;
  ctx["min"] = instances.empty() ? json() : json(len_min);
  ctx["max"] = instances.empty() ? json() : json(len_max);
  ctx["mean"] = instances.empty()
                    ? json()
                    : json(static_cast<double>(len_sum) / static_cast<double>(instances.size()));
  j["context_length"] = ctx;
  j["rule_histogram"] = to_obj(rules);
  return j;
}

// --------------------------------------------------------------------------
// Verify / solve / score
// --------------------------------------------------------------------------

VerifySummary verify_file(const std::string& instances_path, const std::string& report_path,
                          const OracleLimits& limits) {
  std::vector<GroundedInstance> instances = read_instances(instances_path);
  std::vector<json> rows(instances.size());
  std::vector<int> unsound(instances.size(), 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::size_t i = 0; i < instances.size(); ++i) {
    VerificationReport rep = verify_chain(instances[i].chain, limits);
    json row;
    row["id"] = instances[i].id;
    row["sound"] = rep.sound;
    if (!rep.sound) {
      row["failing_step"] = rep.failing_step;
      row["reason"] = rep.reason;
      unsound[i] = 1;
    }
    json steps = json::array();
    for (const auto& s : rep.steps) {
      steps.push_back({{"index", s.index},
                       {"step_type", s.step_type == StepType::Heuristic ? "heuristic" : "symbolic"},
                       {"rule_match_ok", s.rule_match_ok},
                       {"entailment_ok", s.entailment_ok},
                       {"note", s.note}});
    }
    row["steps"] = steps;
    rows[i] = std::move(row);
  }

  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw Error("cannot write " + report_path);
  VerifySummary summary;
  summary.total = static_cast<int>(instances.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].dump() << "\n";
    summary.unsound += unsound[i];
  }
  return summary;
}

void solve_file(const std::string& instances_path, const std::string& out_path,
                const SolveFileOptions& opts) {
  std::vector<GroundedInstance> instances = read_instances(instances_path);
  std::vector<json> rows(instances.size());

  solver::SolveOptions sopts;
  sopts.max_iterations = opts.max_iterations;
  sopts.classes = opts.classes;
  sopts.oracle = opts.oracle;

  std::unique_ptr<SubprocessHeuristicProvider> provider;
  if (!opts.heuristic_command.empty()) {
    provider = std::make_unique<SubprocessHeuristicProvider>(opts.heuristic_command);
  }

  auto run = [&](std::size_t i) {
    solver::SolveResult res = solver::solve(instances[i], provider.get(), sopts);
    json row;
    row["id"] = instances[i].id;
    if (instances[i].question.type == QuestionType::MultipleChoice && res.answer_index >= 0) {
      row["answer"] = res.answer_index;
    } else {
      row["answer"] = res.answer;
    }
    row["iterations"] = res.iterations;
    json trace = json::array();
    for (const auto& s : res.trace) {
      json st;
      st["index"] = s.index;
      st["rule_id"] = s.rule_id;
      st["step_type"] = s.step_type == StepType::Heuristic ? "heuristic" : "symbolic";
      json premises = json::array();
      for (const auto& p : s.premises) premises.push_back(render_formula(p.formula));
      for (const auto& d : s.defaults) premises.push_back(render_default(d));
      st["premises_formal"] = premises;
      st["conclusion_formal"] = render_formula(s.conclusion);
      st["text"] = render_formula(s.conclusion);
      trace.push_back(st);
    }
    row["trace"] = trace;
    rows[i] = std::move(row);
  };

  if (provider) {
    // A single line-oriented subprocess is not reentrant.
    for (std::size_t i = 0; i < instances.size(); ++i) run(i);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < instances.size(); ++i) run(i);
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write " + out_path);
  for (const auto& row : rows) out << row.dump() << "\n";
}

EvalReport score_files(const std::string& gold_path, const std::string& pred_path,
                       const std::string& report_json_path,
                       const std::string& report_table_path) {
  std::vector<GroundedInstance> instances = read_instances(gold_path);
  std::vector<Prediction> predictions = read_predictions(pred_path);
  EvalReport report = aggregate_report(predictions, instances);
  if (!report_json_path.empty()) {
    std::ofstream out(report_json_path, std::ios::binary);
    if (!out) throw Error("cannot write " + report_json_path);
    out << report_to_json(report).dump(2) << "\n";
  }
  if (!report_table_path.empty()) {
    std::ofstream out(report_table_path, std::ios::binary);
    if (!out) throw Error("cannot write " + report_table_path);
    out << report_to_table(report);
  }
  return report;
}

json rules_dump() {
  json j;
  json rules = json::array();
  std::map<std::string, int> counts;
  for (const RuleSchema& r : catalog().rules()) {
    json jr;
    jr["id"] = r.id;
    jr["logic_class"] = to_string(r.logic_class);
    jr["family"] = to_string(r.family);
    json premises = json::array();
    for (const auto& p : r.premise_schemas) premises.push_back(render_formula(p));
    jr["premises"] = premises;
    jr["conclusion"] = render_formula(r.conclusion_schema);
    jr["bidirectional"] = r.bidirectional;
    if (r.is_nm()) {
      json defaults = json::array();
      for (const auto& d : r.nm->default_schemas) defaults.push_back(render_default(d));
      jr["defaults"] = defaults;
      json facts = json::array();
      for (const auto& f : r.nm->fact_schemas) facts.push_back(render_formula(f));
      jr["facts"] = facts;
      json hard = json::array();
      for (const auto& h : r.nm->hard_rule_schemas) hard.push_back(render_formula(h));
      jr["hard_rules"] = hard;
    }
    rules.push_back(jr);
    counts[to_string(r.family)] += 1;
  }
  j["rules"] = rules;
  json jc = json::object();
  for (const auto& [k, v] : counts) jc[k] = v;
  j["counts_by_family"] = jc;
  j["total"] = catalog().rules().size();
  return j;
}

}  // namespace symlog
