#include "symlog/evalharness.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <sstream>

#include "symlog/quality.hpp"

namespace symlog {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> rouge_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string word;
  while (in >> word) {
    std::size_t b = 0, e = word.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(word[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1]))) --e;
    if (b >= e) continue;
    out.push_back(lower(word.substr(b, e - b)));
  }
  return out;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t k = 1; k <= b.size(); ++k) {
      cur[k] = a[i - 1] == b[k - 1] ? prev[k - 1] + 1 : std::max(prev[k], cur[k - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_pair(const std::string& pred, const std::string& gold) {
  std::vector<std::string> tp = rouge_tokens(pred);
  std::vector<std::string> tg = rouge_tokens(gold);
  if (tp.empty() && tg.empty()) return 1.0;
  if (tp.empty() || tg.empty()) return 0.0;
  double lcs = static_cast<double>(lcs_length(tp, tg));
  if (lcs == 0.0) return 0.0;
  double p = lcs / static_cast<double>(tp.size());
  double r = lcs / static_cast<double>(tg.size());
  return 2.0 * p * r / (p + r);
}

}  // namespace

bool score_answer(const std::string& predicted, const std::string& gold, QuestionType type) {
  if (type == QuestionType::TruthEval) {
    std::string p = lower(predicted), g = lower(gold);
    auto valid = [](const std::string& s) {
      return s == "true" || s == "false" || s == "unknown";
    };
    if (!valid(g)) throw DataError("unknown gold label: " + gold);
    if (!valid(p)) {
      if (p == "unresolved") return false;  // solver gave up; scored incorrect
      throw DataError("unknown label: " + predicted);
    }
    return p == g;
  }
  // Multiple choice: index equality; anything non-numeric is incorrect.
  try {
    return std::stoi(predicted) == std::stoi(gold);
  } catch (const std::exception&) {
    return false;
  }
}

double rouge_l(const std::vector<std::string>& pred_steps,
               const std::vector<std::string>& gold_steps) {
  if (pred_steps.empty() && gold_steps.empty()) return 1.0;
  std::size_t n = std::max(pred_steps.size(), gold_steps.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < pred_steps.size() && i < gold_steps.size()) {
      total += rouge_pair(pred_steps[i], gold_steps[i]);
    }  // unmatched index on either side scores 0
  }
  return total / static_cast<double>(n);
}

double jaccard_steps(const std::vector<std::string>& pred_steps,
                     const std::vector<std::string>& gold_steps) {
  if (pred_steps.empty() && gold_steps.empty()) return 1.0;
  std::size_t n = std::max(pred_steps.size(), gold_steps.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < pred_steps.size() && i < gold_steps.size()) {
      total += jaccard(pred_steps[i], gold_steps[i]);
    }
  }
  return total / static_cast<double>(n);
}

std::string depth_bucket(int depth) {
  if (depth <= 3) return "2-3";
  if (depth <= 5) return "4-5";
  if (depth <= 7) return "6-7";
  return "8-9";
}

EvalReport aggregate_report(const std::vector<Prediction>& predictions,
                            const std::vector<GroundedInstance>& instances) {
  std::map<std::string, const GroundedInstance*> by_id;
  for (const auto& inst : instances) by_id[inst.id] = &inst;

  EvalReport report;
  double rouge_sum = 0.0, jaccard_sum = 0.0;
  std::map<std::string, std::pair<double, int>> external;

  for (const auto& pred : predictions) {
    auto it = by_id.find(pred.id);
    if (it == by_id.end()) throw DataError("prediction references unknown instance id: " + pred.id);
    const GroundedInstance& inst = *it->second;

    std::string gold = inst.question.type == QuestionType::TruthEval
                           ? inst.question.gold_label
                           : std::to_string(inst.question.gold_index);
    EvalRecord rec;
    rec.id = pred.id;
    rec.predicted = pred.answer;
    rec.gold = gold;
    rec.answer_correct = score_answer(pred.answer, gold, inst.question.type);

    std::vector<std::string> gold_steps;
    for (const auto& nl : inst.step_nl) gold_steps.push_back(nl.conclusion_nl);
    rec.rouge_l = rouge_l(pred.steps, gold_steps);
    rec.jaccard = jaccard_steps(pred.steps, gold_steps);
    rec.external_scores = pred.external_scores;

    report.total += 1;
    report.correct += rec.answer_correct ? 1 : 0;
    rouge_sum += rec.rouge_l;
    jaccard_sum += rec.jaccard;
    for (const auto& [k, v] : pred.external_scores) {
      external[k].first += v;
      external[k].second += 1;
    }

    auto bump = [&](std::map<std::string, ReportCell>& cells, const std::string& key) {
      ReportCell& c = cells[key];
      c.count += 1;
      c.correct += rec.answer_correct ? 1 : 0;
    };
    bump(report.by_domain, inst.domain);
    bump(report.by_logic, to_string(inst.logic_type));
    bump(report.by_domain_logic, inst.domain + "|" + to_string(inst.logic_type));
    bump(report.by_depth_bucket, depth_bucket(inst.depth));
    report.records.push_back(std::move(rec));
  }

  if (report.total > 0) {
    report.accuracy = 100.0 * report.correct / report.total;
    report.mean_rouge_l = rouge_sum / report.total;
    report.mean_jaccard = jaccard_sum / report.total;
  }
  for (const auto& [k, acc] : external) {
    report.external_means[k] = acc.first / acc.second;
  }
  return report;
}

json report_to_json(const EvalReport& report) {
  json j;
  j["total"] = report.total;
  j["correct"] = report.correct;
  j["accuracy"] = report.accuracy;
  j["mean_rouge_l"] = report.mean_rouge_l;
  j["mean_jaccard"] = report.mean_jaccard;
  auto cells = [](const std::map<std::string, ReportCell>& m) {
    json out;
    for (const auto& [k, c] : m) {
      out[k] = {{"count", c.count}, {"correct", c.correct}, {"accuracy", c.accuracy()}};
    }
    return out;
  };
  j["by_domain"] = cells(report.by_domain);
  j["by_logic"] = cells(report.by_logic);
  j["by_domain_logic"] = cells(report.by_domain_logic);
  j["by_depth_bucket"] = cells(report.by_depth_bucket);
  // Reserved slots for externally computed metrics (neural scorers etc.).
  json ext = json::object();
  for (const auto& [k, v] : report.external_means) ext[k] = v;
  j["external_means"] = ext;
  json records = json::array();
  for (const auto& r : report.records) {
    json jr;
    jr["id"] = r.id;
    jr["predicted"] = r.predicted;
    jr["gold"] = r.gold;
    jr["answer_correct"] = r.answer_correct;
    jr["rouge_l"] = r.rouge_l;
    jr["jaccard"] = r.jaccard;
    if (!r.external_scores.empty()) {
      json e = json::object();
      for (const auto& [k, v] : r.external_scores) e[k] = v;
      jr["external_scores"] = e;
    }
    records.push_back(jr);
  }
  j["records"] = records;
  return j;
}

std::string report_to_table(const EvalReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);

  std::vector<std::string> domains;
  for (const auto& [d, c] : report.by_domain) {
    (void)c;
    domains.push_back(d);
  }
  std::vector<std::string> logics = {"PL", "FOL", "NM"};

  std::size_t w = 12;
  for (const auto& d : domains) w = std::max(w, d.size() + 2);

  os << std::left << std::setw(static_cast<int>(w)) << "domain";
  for (const auto& l : logics) os << std::right << std::setw(9) << l;
  os << std::right << std::setw(9) << "all" << "\n";

  auto cell_text = [&](const ReportCell* c) {
    if (!c || c->count == 0) return std::string("—");
    std::ostringstream v;
    v << std::fixed << std::setprecision(1) << c->accuracy();
    return v.str();
  };

  for (const auto& d : domains) {
    os << std::left << std::setw(static_cast<int>(w)) << d;
    for (const auto& l : logics) {
      auto it = report.by_domain_logic.find(d + "|" + l);
      os << std::right << std::setw(9)
         << cell_text(it == report.by_domain_logic.end() ? nullptr : &it->second);
    }
    auto itd = report.by_domain.find(d);
    os << std::right << std::setw(9)
       << cell_text(itd == report.by_domain.end() ? nullptr : &itd->second) << "\n";
  }
  os << std::left << std::setw(static_cast<int>(w)) << "all";
  for (const auto& l : logics) {
    auto it = report.by_logic.find(l);
    os << std::right << std::setw(9)
       << cell_text(it == report.by_logic.end() ? nullptr : &it->second);
  }
  {
    std::ostringstream v;
    v << std::fixed << std::setprecision(1) << report.accuracy;
    os << std::right << std::setw(9) << (report.total ? v.str() : "—") << "\n";
  }

  os << "\n" << std::left << std::setw(static_cast<int>(w)) << "depth";
  for (const char* b : {"2-3", "4-5", "6-7", "8-9"}) os << std::right << std::setw(9) << b;
  os << "\n" << std::left << std::setw(static_cast<int>(w)) << "accuracy";
  for (const char* b : {"2-3", "4-5", "6-7", "8-9"}) {
    auto it = report.by_depth_bucket.find(b);
    os << std::right << std::setw(9)
       << cell_text(it == report.by_depth_bucket.end() ? nullptr : &it->second);
  }
  os << "\n";
  return os.str();
}

Prediction prediction_from_json(const json& j) {
  Prediction p;
  try {
    p.id = j.at("id").get<std::string>();
    const json& a = j.at("answer");
    p.answer = a.is_string() ? a.get<std::string>() : std::to_string(a.get<int>());
    if (j.contains("trace")) {
      for (const auto& t : j.at("trace")) {
        if (t.contains("text") && !t.at("text").get<std::string>().empty()) {
          p.steps.push_back(t.at("text").get<std::string>());
        } else if (t.contains("conclusion_formal")) {
          p.steps.push_back(t.at("conclusion_formal").get<std::string>());
        }
      }
    }
    if (j.contains("external_scores")) {
      for (const auto& [k, v] : j.at("external_scores").items()) {
        p.external_scores[k] = v.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed prediction record: ") + e.what());
  }
  return p;
}

}  // namespace symlog
