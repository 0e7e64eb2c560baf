#include "albo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace albo {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

namespace {

bool is_bo_strategy(const std::string& id) { return id == "nomax" || id == "withmax"; }

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

std::string default_label(const ExperimentConfig& config) {
  std::string label = config.problem_id + "-" + config.strategy_id;
  if (is_bo_strategy(config.strategy_id)) label += "-" + to_string(config.strategy.surrogate);
  return label;
}

ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::vector<std::string> known = {
      "problem_id", "strategy_id", "n_init", "n_iter",   "budget",   "candidate_count", "mc_draws",
      "surrogate",  "acquisition", "schedule", "lambda0", "rho0",    "seed",            "restarts",
      "jobs",       "output_dir",  "label"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  }

  ExperimentConfig c = std::move(base);
  try {
    if (j.contains("problem_id")) c.problem_id = get_as<std::string>(j, "problem_id");
    if (j.contains("strategy_id")) c.strategy_id = get_as<std::string>(j, "strategy_id");
    if (j.contains("n_init")) c.strategy.n_init = get_as<int>(j, "n_init");
    if (j.contains("n_iter")) c.strategy.n_iter = get_as<int>(j, "n_iter");
    if (j.contains("budget")) {
      const int budget = get_as<int>(j, "budget");
      if (j.contains("n_iter") && c.strategy.n_init + c.strategy.n_iter != budget) {
        throw ConfigError("budget must equal n_init + n_iter");
      }
      c.strategy.n_iter = budget - c.strategy.n_init;
    }
    if (j.contains("candidate_count")) c.strategy.candidate_count = get_as<int>(j, "candidate_count");
    if (j.contains("mc_draws")) c.strategy.mc_draws = get_as<int>(j, "mc_draws");
    if (j.contains("surrogate")) c.strategy.surrogate = parse_surrogate(get_as<std::string>(j, "surrogate"));
    if (j.contains("acquisition")) c.strategy.acquisition = parse_acquisition(get_as<std::string>(j, "acquisition"));
    if (j.contains("schedule")) c.strategy.schedule = parse_schedule(get_as<std::string>(j, "schedule"));
    if (j.contains("lambda0")) {
      const auto values = get_as<std::vector<double>>(j, "lambda0");
      c.strategy.lambda0 = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
    if (j.contains("rho0")) c.strategy.rho0 = get_as<double>(j, "rho0");
    if (j.contains("seed")) c.strategy.seed = get_as<std::uint64_t>(j, "seed");
    if (j.contains("restarts")) c.restarts = get_as<int>(j, "restarts");
    if (j.contains("jobs")) c.jobs = get_as<int>(j, "jobs");
    if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir");
    if (j.contains("label")) c.label = get_as<std::string>(j, "label");
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  j["problem_id"] = config.problem_id;
  j["strategy_id"] = config.strategy_id;
  j["n_init"] = config.strategy.n_init;
  j["n_iter"] = config.strategy.n_iter;
  j["budget"] = config.budget();
  j["candidate_count"] = config.strategy.candidate_count;
  j["mc_draws"] = config.strategy.mc_draws;
  j["surrogate"] = to_string(config.strategy.surrogate);
  j["acquisition"] = to_string(config.strategy.acquisition);
  j["schedule"] = to_string(config.strategy.schedule);
  j["lambda0"] = std::vector<double>(config.strategy.lambda0.data(),
                                     config.strategy.lambda0.data() + config.strategy.lambda0.size());
  j["rho0"] = config.strategy.rho0;
  j["seed"] = config.strategy.seed;
  j["restarts"] = config.restarts;
  j["jobs"] = config.jobs;
  j["output_dir"] = config.output_dir.string();
  j["label"] = config.label.empty() ? default_label(config) : config.label;
  return j.dump(2);
}

void validate(const ExperimentConfig& config) {
  const auto ids = problem_ids();
  if (std::find(ids.begin(), ids.end(), config.problem_id) == ids.end()) {
    throw ConfigError("unknown problem id '" + config.problem_id + "'");
  }
  if (config.strategy_id != "random" && !is_bo_strategy(config.strategy_id)) {
    throw ConfigError("unknown strategy id '" + config.strategy_id + "'");
  }
  if (config.restarts < 1) throw ConfigError("restarts must be at least 1");
  if (config.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (config.strategy.n_init < 1) throw ConfigError("n_init must be at least 1");
  if (config.strategy.n_iter < 0) throw ConfigError("n_iter must be non-negative");
  if (config.strategy.candidate_count < 1) throw ConfigError("candidate_count must be at least 1");
  if (config.strategy.mc_draws < 1) throw ConfigError("mc_draws must be at least 1");
  if (!(config.strategy.rho0 > 0.0)) throw ConfigError("rho0 must be positive");
  const ConstrainedProblem problem = make_problem(config.problem_id);
  if (is_bo_strategy(config.strategy_id) && config.strategy.n_init < problem.dimension() + 1) {
    throw ConfigError("n_init must be at least d + 1 for BO strategies");
  }
  if (config.strategy.lambda0.size() != 0 &&
      (config.strategy.lambda0.size() != problem.num_constraints() || (config.strategy.lambda0.array() < 0.0).any())) {
    throw ConfigError("lambda0 must have one non-negative entry per constraint");
  }
}

// ---------------------------------------------------------------------------
// Running

Trajectory run_strategy(const ConstrainedProblem& problem, const ExperimentConfig& config, std::uint64_t seed) {
  if (config.strategy_id == "random") return random_search(problem, config.budget(), seed);
  StrategyConfig strategy = config.strategy;
  strategy.seed = seed;
  strategy.variant = parse_variant(config.strategy_id);
  return bo_auglag(problem, strategy);
}

AggregateResult aggregate(const std::vector<RestartResult>& restarts, const std::string& label) {
  AggregateResult out;
  out.label = label;
  std::vector<const Trajectory*> included;
  std::size_t length = 0;
  for (const RestartResult& r : restarts) {
    length = std::max(length, r.trajectory.size());
    if (r.failure.empty() && !r.trajectory.best_feasible.empty() && r.trajectory.best_feasible.back()) {
      included.push_back(&r.trajectory);
    } else {
      ++out.excluded;
    }
  }
  out.included = static_cast<int>(included.size());
  out.mean_trajectory.assign(length, std::nullopt);
  out.stderr_trajectory.assign(length, std::nullopt);
  out.final_mean = std::numeric_limits<double>::quiet_NaN();
  out.final_stderr = std::numeric_limits<double>::quiet_NaN();
  if (included.empty()) return out;

  for (std::size_t k = 0; k < length; ++k) {
    double sum = 0.0;
    bool complete = true;
    for (const Trajectory* t : included) {
      if (k >= t->size() || !t->best_feasible[k]) {
        complete = false;
        break;
      }
      sum += *t->best_feasible[k];
    }
    if (!complete) continue;
    const double n = static_cast<double>(included.size());
    const double mean = sum / n;
    double squares = 0.0;
    for (const Trajectory* t : included) squares += (*t->best_feasible[k] - mean) * (*t->best_feasible[k] - mean);
    out.mean_trajectory[k] = mean;
    out.stderr_trajectory[k] = included.size() > 1 ? std::sqrt(squares / (n - 1.0) / n) : 0.0;
  }
  if (out.mean_trajectory.back()) {
    out.final_mean = *out.mean_trajectory.back();
    out.final_stderr = *out.stderr_trajectory.back();
  }
  return out;
}

namespace {

json iteration_log_json(const Trajectory& t) {
  json items = json::array();
  for (const IterationLog& log : t.iterations) {
    json item;
    item["eval"] = log.evaluation;
    item["best_al"] = log.best_al;
    item["acquisition_score"] = log.acquisition_score;
    json gps = json::array();
    for (const GPHyperparameters& h : log.hyperparameters) {
      gps.push_back({{"lengthscales", std::vector<double>(h.lengthscales.data(),
                                                          h.lengthscales.data() + h.lengthscales.size())},
                     {"signal_variance", h.signal_variance},
                     {"nugget", h.nugget}});
    }
    item["gp"] = std::move(gps);
    if (log.coupling.size() > 0) {
      json rows = json::array();
      for (Eigen::Index i = 0; i < log.coupling.rows(); ++i) {
        const Vector row = log.coupling.row(i).transpose();
        rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
      }
      item["coupling"] = std::move(rows);
    }
    const auto index = static_cast<std::size_t>(log.evaluation - 1);
    if (index < t.al_states.size()) {
      const ALState& s = t.al_states[index];
      item["lambda"] = std::vector<double>(s.lambda.data(), s.lambda.data() + s.lambda.size());
      item["rho"] = s.rho;
    }
    items.push_back(std::move(item));
  }
  return items;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

std::string restart_stem(int restart) {
  std::ostringstream s;
  s << "restart_" << std::setw(3) << std::setfill('0') << restart;
  return s.str();
}

}  // namespace

AggregateResult run_experiment(const ExperimentConfig& config, std::vector<RestartResult>* restarts_out) {
  validate(config);
  const ConstrainedProblem problem = make_problem(config.problem_id);
  const std::string label = config.label.empty() ? default_label(config) : config.label;

  if (!config.output_dir.empty()) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + config.output_dir.string() + ": " + ec.message());
  }

  std::vector<RestartResult> results(static_cast<std::size_t>(config.restarts));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < config.restarts; r = next++) {
      RestartResult& result = results[static_cast<std::size_t>(r)];
      result.restart = r;
      result.seed = config.strategy.seed + static_cast<std::uint64_t>(r);
      try {
        result.trajectory = run_strategy(problem, config, result.seed);
      } catch (const std::exception& e) {
        result.failure = e.what();
      }
      if (!config.output_dir.empty()) {
        const fs::path stem = config.output_dir / restart_stem(r);
        write_csv(result.trajectory, r, fs::path(stem).concat(".csv"));
        json log;
        log["restart"] = r;
        log["seed"] = result.seed;
        log["failure"] = result.failure;
        log["iterations"] = iteration_log_json(result.trajectory);
        write_text(fs::path(stem).concat(".json"), log.dump(2) + "\n");
      }
    }
  };

  const int jobs = std::min(config.jobs, config.restarts);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (int i = 0; i < jobs; ++i) {
      pool.emplace_back([&] {
        try {
          worker();
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
  }

  AggregateResult result = aggregate(results, label);
  if (!config.output_dir.empty()) {
    write_csv(result, config.output_dir / "aggregate.csv");
    json summary = json::parse(config_to_json(config));
    summary["label"] = label;
    summary["final_mean"] = std::isfinite(result.final_mean) ? json(result.final_mean) : json(nullptr);
    summary["final_stderr"] = std::isfinite(result.final_stderr) ? json(result.final_stderr) : json(nullptr);
    summary["included"] = result.included;
    summary["excluded"] = result.excluded;
    json failures = json::array();
    for (const RestartResult& r : results) {
      if (!r.failure.empty()) failures.push_back({{"restart", r.restart}, {"error", r.failure}});
    }
    summary["failures"] = std::move(failures);
    write_text(config.output_dir / "summary.json", summary.dump(2) + "\n");
  }
  if (restarts_out != nullptr) *restarts_out = std::move(results);
  return result;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw CsvError("malformed number '" + text + "' in " + context);
  return value;
}

long parse_integer(const std::string& text, const std::string& context) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw CsvError("malformed integer '" + text + "' in " + context);
  }
  return value;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

int count_prefixed(const std::vector<std::string>& header, std::size_t start, const std::string& prefix) {
  int count = 0;
  for (std::size_t i = start; i < header.size(); ++i) {
    if (header[i] != prefix + std::to_string(count)) break;
    ++count;
  }
  return count;
}

}  // namespace

void write_csv(const Trajectory& trajectory, int restart, const fs::path& path) {
  const Eigen::Index d = trajectory.evaluations.empty() ? 0 : trajectory.evaluations.front().x.size();
  const Eigen::Index m = trajectory.evaluations.empty() ? 0 : trajectory.evaluations.front().c.size();
  std::ostringstream out;
  out << "restart,eval";
  for (Eigen::Index i = 0; i < d; ++i) out << ",x" << i;
  out << ",f";
  for (Eigen::Index i = 0; i < m; ++i) out << ",c" << i;
  out << ",feasible,best_feasible";
  for (Eigen::Index i = 0; i < m; ++i) out << ",lambda" << i;
  out << ",rho\n";

  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const Evaluation& e = trajectory.evaluations[k];
    out << restart << ',' << (k + 1);
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(e.x(i));
    out << ',' << format_double(e.f);
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_double(e.c(i));
    out << ',' << (e.feasible ? 1 : 0) << ',';
    if (trajectory.best_feasible[k]) out << format_double(*trajectory.best_feasible[k]);
    if (k < trajectory.al_states.size()) {
      const ALState& s = trajectory.al_states[k];
      for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_double(s.lambda(i));
      out << ',' << format_double(s.rho);
    } else {
      for (Eigen::Index i = 0; i <= m; ++i) out << ',';
    }
    out << '\n';
  }
  write_text(path, out.str());
}

Trajectory read_csv(const fs::path& path, int* restart) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw CsvError(path.string() + " is empty");
  const std::vector<std::string> header = split_fields(lines.front());
  if (header.size() < 2 || header[0] != "restart" || header[1] != "eval") {
    throw CsvError(path.string() + ": header must start with restart,eval");
  }
  const int d = count_prefixed(header, 2, "x");
  std::size_t pos = 2 + static_cast<std::size_t>(d);
  if (pos >= header.size() || header[pos] != "f") throw CsvError(path.string() + ": missing f column");
  const int m = count_prefixed(header, pos + 1, "c");
  pos += 1 + static_cast<std::size_t>(m);
  if (pos + 1 >= header.size() || header[pos] != "feasible" || header[pos + 1] != "best_feasible") {
    throw CsvError(path.string() + ": missing feasible,best_feasible columns");
  }
  if (count_prefixed(header, pos + 2, "lambda") != m || header.size() != pos + 3 + static_cast<std::size_t>(m) ||
      header.back() != "rho") {
    throw CsvError(path.string() + ": malformed lambda/rho columns");
  }

  Trajectory t;
  bool any_state = false;
  bool all_state = true;
  std::vector<ALState> states;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string context = path.string() + " line " + std::to_string(row + 1);
    const std::vector<std::string> fields = split_fields(lines[row]);
    if (fields.size() != header.size()) throw CsvError(context + ": wrong field count");
    if (restart != nullptr) *restart = static_cast<int>(parse_integer(fields[0], context));
    if (parse_integer(fields[1], context) != static_cast<long>(row)) throw CsvError(context + ": eval out of sequence");

    Evaluation e;
    e.x.resize(d);
    e.c.resize(m);
    for (int i = 0; i < d; ++i) e.x(i) = parse_double(fields[2 + static_cast<std::size_t>(i)], context);
    std::size_t at = 2 + static_cast<std::size_t>(d);
    e.f = parse_double(fields[at++], context);
    for (int i = 0; i < m; ++i) e.c(i) = parse_double(fields[at++], context);
    const std::string& feasible = fields[at++];
    if (feasible != "0" && feasible != "1") throw CsvError(context + ": feasible must be 0 or 1");
    e.feasible = feasible == "1";
    const std::string& best = fields[at++];
    t.evaluations.push_back(std::move(e));
    t.best_feasible.push_back(best.empty() ? std::nullopt : std::optional<double>(parse_double(best, context)));

    if (fields.back().empty()) {
      all_state = false;
    } else {
      any_state = true;
      ALState s;
      s.lambda.resize(m);
      for (int i = 0; i < m; ++i) s.lambda(i) = parse_double(fields[at++], context);
      s.rho = parse_double(fields.back(), context);
      states.push_back(std::move(s));
    }
  }
  if (any_state && !all_state) throw CsvError(path.string() + ": lambda/rho present on some rows only");
  t.al_states = std::move(states);
  return t;
}

void write_csv(const AggregateResult& result, const fs::path& path) {
  std::ostringstream out;
  out << "eval,mean_best_feasible,stderr_best_feasible\n";
  for (std::size_t k = 0; k < result.mean_trajectory.size(); ++k) {
    out << (k + 1) << ',';
    if (result.mean_trajectory[k]) out << format_double(*result.mean_trajectory[k]);
    out << ',';
    if (result.stderr_trajectory[k]) out << format_double(*result.stderr_trajectory[k]);
    out << '\n';
  }
  write_text(path, out.str());
}

AggregateResult read_aggregate_csv(const fs::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines.front() != "eval,mean_best_feasible,stderr_best_feasible") {
    throw CsvError(path.string() + ": not an aggregate CSV");
  }
  AggregateResult out;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string context = path.string() + " line " + std::to_string(row + 1);
    const std::vector<std::string> fields = split_fields(lines[row]);
    if (fields.size() != 3) throw CsvError(context + ": wrong field count");
    if (parse_integer(fields[0], context) != static_cast<long>(row)) throw CsvError(context + ": eval out of sequence");
    out.mean_trajectory.push_back(fields[1].empty() ? std::nullopt
                                                    : std::optional<double>(parse_double(fields[1], context)));
    out.stderr_trajectory.push_back(fields[2].empty() ? std::nullopt
                                                      : std::optional<double>(parse_double(fields[2], context)));
  }
  out.final_mean = std::numeric_limits<double>::quiet_NaN();
  out.final_stderr = std::numeric_limits<double>::quiet_NaN();
  if (!out.mean_trajectory.empty() && out.mean_trajectory.back()) {
    out.final_mean = *out.mean_trajectory.back();
    out.final_stderr = out.stderr_trajectory.back().value_or(0.0);
  }

  const fs::path parent = path.parent_path();
  out.label = parent.empty() ? path.stem().string() : parent.filename().string();
  std::ifstream summary_file(parent / "summary.json");
  if (summary_file) {
    try {
      const json summary = json::parse(summary_file);
      out.label = summary.value("label", out.label);
      out.included = summary.value("included", 0);
      out.excluded = summary.value("excluded", 0);
    } catch (const json::exception&) {
      // A damaged summary only costs us the label.
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reporting

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

std::string series_colour(const std::string& label, std::size_t index) {
  const std::string l = lowercase(label);
  if (l.find("withmax") != std::string::npos || l.find("lmc") != std::string::npos) return "#808080";
  if (l.find("nomax") != std::string::npos || l.find("indep") != std::string::npos) return "#000000";
  static const char* palette[] = {"#000000", "#808080", "#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  return palette[index % (sizeof palette / sizeof *palette)];
}

std::string fixed(double v, int precision = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string tick_label(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

}  // namespace

void emit_plot(const std::vector<AggregateResult>& results, const std::vector<std::string>& labels,
               const fs::path& path, const PlotOptions& options) {
  if (results.empty()) throw InvalidArgument("plot needs at least one series");
  if (!labels.empty() && labels.size() != results.size()) throw InvalidArgument("label count must match series count");
  const std::size_t length = results.front().mean_trajectory.size();
  for (const AggregateResult& r : results) {
    if (r.mean_trajectory.size() != length) throw InvalidArgument("plot series must have equal length");
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const AggregateResult& r : results) {
    for (const auto& v : r.mean_trajectory) {
      if (v) {
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    const double pad = std::max(1e-3, 0.5 * std::abs(lo));
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }

  constexpr double width = 640.0, height = 420.0;
  constexpr double left = 80.0, right = 20.0, top = 40.0, bottom = 60.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double x_max = std::max<double>(1.0, static_cast<double>(length));
  const auto px = [&](double e) { return left + plot_w * e / x_max; };
  const auto py = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"15\">" << xml_escape(options.title) << "</text>\n";
  }
  svg << "<g stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h << "\"/>\n"
      << "</g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#000000\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double e = x_max * i / 5.0;
    svg << "<text x=\"" << fixed(px(e)) << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">"
        << tick_label(std::round(e)) << "</text>\n";
    const double v = lo + (hi - lo) * i / 5.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v)
        << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 18 << "\" text-anchor=\"middle\">"
      << xml_escape(options.x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\">" << xml_escape(options.y_label) << "</text>\n"
      << "</g>\n";

  for (std::size_t s = 0; s < results.size(); ++s) {
    const std::string label = labels.empty() ? results[s].label : labels[s];
    const std::string colour = series_colour(label, s);
    std::ostringstream points;
    bool first = true;
    for (std::size_t k = 0; k < length; ++k) {
      const auto& v = results[s].mean_trajectory[k];
      if (!v) continue;
      if (first) {
        // The curve starts at the left axis with its first defined value.
        points << fixed(px(0.0)) << ',' << fixed(py(*v));
        first = false;
      }
      points << ' ' << fixed(px(static_cast<double>(k + 1))) << ',' << fixed(py(*v));
    }
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"" << points.str()
        << "\"><title>" << xml_escape(label) << "</title></polyline>\n";
    const double ly = top + 14 + 16.0 * static_cast<double>(s);
    svg << "<line x1=\"" << left + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w - 126 << "\" y2=\""
        << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + plot_w - 120 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(label) << "</text>\n";
  }
  svg << "</svg>\n";
  write_text(path, svg.str());
}

std::string format_table(const std::vector<AggregateResult>& results) {
  std::size_t width = 5;
  for (const AggregateResult& r : results) width = std::max(width, r.label.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "label" << "  " << std::right << std::setw(12) << "evals"
      << std::setw(14) << "final mean" << std::setw(12) << "stderr" << std::setw(10) << "included" << std::setw(10)
      << "excluded" << '\n';
  for (const AggregateResult& r : results) {
    out << std::left << std::setw(static_cast<int>(width)) << r.label << "  " << std::right << std::setw(12)
        << r.mean_trajectory.size() << std::setw(14) << std::setprecision(4) << r.final_mean << std::setw(12)
        << std::setprecision(2) << r.final_stderr << std::setw(10) << r.included << std::setw(10) << r.excluded << '\n';
  }
  return out.str();
}

}  // namespace albo
