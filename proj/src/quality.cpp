#include "symlog/quality.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

namespace symlog {

std::set<std::string> jaccard_tokens(const std::string& s) {
  std::set<std::string> out;
  std::istringstream in(s);
  std::string word;
  while (in >> word) {
    std::size_t b = 0, e = word.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(word[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1]))) --e;
    if (b >= e) continue;
    std::string t = word.substr(b, e - b);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.insert(t);
  }
  return out;
}

double jaccard(const std::string& a, const std::string& b) {
  std::set<std::string> ta = jaccard_tokens(a);
  std::set<std::string> tb = jaccard_tokens(b);
  if (ta.empty() && tb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : ta) inter += tb.count(t);
  std::size_t uni = ta.size() + tb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<double> RecordedScorer::score(const std::string& step_text) {
  auto it = scores_.find(step_text);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> CachingScorer::score(const std::string& step_text) {
  auto it = cache_.find(step_text);
  if (it != cache_.end()) return it->second;
  std::optional<double> s = inner_ ? inner_->score(step_text) : std::nullopt;
  if (s) cache_.emplace(step_text, *s);
  return s;
}

// --------------------------------------------------------------------------
// Subprocess scorer
// --------------------------------------------------------------------------

SubprocessScorer::SubprocessScorer(const std::string& command, int timeout_ms)
    : timeout_ms_(timeout_ms) {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw Error("scorer: pipe() failed");
  }
  pid_t pid = fork();
  if (pid < 0) throw Error("scorer: fork() failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
  pid_ = pid;
}

SubprocessScorer::~SubprocessScorer() {
  if (in_fd_ >= 0) close(in_fd_);
  if (out_fd_ >= 0) close(out_fd_);
  if (pid_ > 0) {
    kill(static_cast<pid_t>(pid_), SIGTERM);
    int status = 0;
    waitpid(static_cast<pid_t>(pid_), &status, 0);
  }
}

std::optional<double> SubprocessScorer::score(const std::string& step_text) {
  if (in_fd_ < 0 || out_fd_ < 0) return std::nullopt;
  std::string line = step_text;
  std::replace(line.begin(), line.end(), '\n', ' ');
  line += '\n';
  const char* data = line.c_str();
  std::size_t remaining = line.size();
  while (remaining > 0) {
    ssize_t n = write(in_fd_, data, remaining);
    if (n <= 0) return std::nullopt;
    data += n;
    remaining -= static_cast<std::size_t>(n);
  }
  // Read one reply line, honoring the timeout.
  while (true) {
    std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      try {
        double v = std::stod(reply);
        if (v < 0.0 || v > 1.0) return std::nullopt;
        return v;
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
    struct pollfd pfd{out_fd_, POLLIN, 0};
    int r = poll(&pfd, 1, timeout_ms_);
    if (r <= 0) return std::nullopt;
    char chunk[256];
    ssize_t n = read(out_fd_, chunk, sizeof(chunk));
    if (n <= 0) return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

// --------------------------------------------------------------------------
// HTTP scorer
// --------------------------------------------------------------------------

HttpScorer::HttpScorer(const std::string& host, int port, const std::string& path, int timeout_ms)
    : host_(host), path_(path), port_(port), timeout_ms_(timeout_ms) {}

std::optional<double> HttpScorer::score(const std::string& step_text) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(0, timeout_ms_ * 1000);
  client.set_read_timeout(0, timeout_ms_ * 1000);
  auto res = client.Post(path_.c_str(), step_text, "text/plain; charset=utf-8");
  if (!res || res->status != 200) return std::nullopt;
  try {
    double v = std::stod(res->body);
    if (v < 0.0 || v > 1.0) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// --------------------------------------------------------------------------
// Filter
// --------------------------------------------------------------------------

FilterDecision filter_instance(const GroundedInstance& instance, PlausibilityScorer* scorer,
                               const FilterConfig& config) {
  if (instance.chain.steps.size() < 2) {
    throw Error("filter_instance: instance must have at least 2 steps");
  }
  FilterDecision decision;
  std::vector<std::string> texts;
  for (const auto& nl : instance.step_nl) texts.push_back(nl.conclusion_nl);

  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (std::size_t k = i + 1; k < texts.size(); ++k) {
      double s = jaccard(texts[i], texts[k]);
      if (s > config.lexical_threshold) {
        decision.reasons.push_back(FilterReason{"lexical_similarity", static_cast<int>(i),
                                                static_cast<int>(k), s});
      }
    }
  }
  if (!decision.reasons.empty()) {
    decision.status = FilterDecision::Status::Rejected;
  }

  if (scorer) {
    decision.plausibility_checked = true;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      std::optional<double> s = scorer->score(texts[i]);
      if (!s) {
        decision.status = FilterDecision::Status::Undecided;
        decision.reasons.push_back(
            FilterReason{"scorer_failure", static_cast<int>(i), -1, 0.0});
        return decision;
      }
      if (*s < config.plausibility_threshold) {
        decision.reasons.push_back(FilterReason{"plausibility", static_cast<int>(i), -1, *s});
        decision.status = FilterDecision::Status::Rejected;
      }
    }
  }
  return decision;
}

}  // namespace symlog
