// Copyright 2026 The Convention Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "convention/run_config.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <type_traits>

#include "convention/summary.h"

namespace convention {

namespace {

// Calls f(name, member) for every field, in manifest order.
template <typename C, typename F>
void ForEachField(C& c, F&& f) {
  f("sim", c.sim);
  f("regime", c.regime);
  f("n_runs", c.n_runs);
  f("seed", c.seed);
  f("n_steps", c.n_steps);
  f("learning_rate", c.learning_rate);
  f("n_mc_elbo", c.n_mc_elbo);
  f("n_mc_predictive", c.n_mc_predictive);
  f("average_fraction", c.average_fraction);
  f("w_I", c.w_I);
  f("w_C", c.w_C);
  f("theta_prior_std", c.theta_prior_std);
  f("phi_drift_std", c.phi_drift_std);
  f("bias", c.bias);
  f("n_partners", c.n_partners);
  f("trials_per_partner", c.trials_per_partner);
  f("n_agents", c.n_agents);
  f("trials_per_pair", c.trials_per_pair);
  f("alignment", c.alignment);
  f("n_bootstrap", c.n_bootstrap);
  f("output_dir", c.output_dir);
  f("workers", c.workers);
}

template <typename T>
void AssignJson(const std::string& key, const nlohmann::json& v, T& field) {
  bool ok;
  if constexpr (std::is_same_v<T, std::string>) {
    ok = v.is_string();
  } else if constexpr (std::is_same_v<T, double>) {
    ok = v.is_number();
  } else if constexpr (std::is_unsigned_v<T>) {
    ok = v.is_number_unsigned();
  } else {
    ok = v.is_number_integer();
  }
  if (!ok) throw ConventionError("config key '" + key + "' has the wrong type: " + v.dump());
  field = v.get<T>();
}

template <typename T>
void AssignText(const std::string& key, const std::string& text, T& field) {
  if constexpr (std::is_same_v<T, std::string>) {
    field = text;
  } else {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      throw ConventionError("cannot parse '" + text + "' for key '" + key + "'");
    }
    field = value;
  }
}

bool OneOf(const std::string& s, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (s == o) return true;
  }
  return false;
}

std::vector<PoolingRegime> Regimes(const std::string& name) {
  if (name == "all") return {PoolingRegime::kPartial, PoolingRegime::kComplete, PoolingRegime::kNone};
  return {ParseRegime(name)};
}

// Field-level CSV writer; no value produced here needs quoting.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> header)
      : path_(path), out_(path) {
    if (!out_) throw ConventionError("cannot open " + path.string() + " for writing");
    for (const char* h : header) Field(h);
    EndRow();
  }

  CsvWriter& Field(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }
  CsvWriter& Field(int v) { return Field(std::to_string(v)); }
  CsvWriter& Field(double v) { return Field(FormatNumber(v)); }

  void EndRow() {
    out_ << '\n';
    first_ = true;
  }

  void Close() {
    out_.close();
    if (!out_) throw ConventionError("error writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool first_ = true;
};

void WriteTrials(const std::filesystem::path& path, const std::vector<TrialRecord>& trials) {
  CsvWriter csv(path, {"run_id", "sim", "regime", "block", "trial", "partner_index", "speaker_id",
                       "listener_id", "target", "utterance", "choice", "listener_target_prob",
                       "utterance_length"});
  for (const auto& t : trials) {
    csv.Field(t.run_id)
        .Field(SimName(t.sim))
        .Field(RegimeName(t.regime))
        .Field(t.block)
        .Field(t.trial)
        .Field(t.partner_index)
        .Field(t.speaker_id)
        .Field(t.listener_id)
        .Field(t.target.index)
        .Field(t.utterance.ToString())
        .Field(t.choice.index)
        .Field(t.listener_target_prob)
        .Field(t.utterance_length);
    csv.EndRow();
  }
  csv.Close();
}

// regime and target trail the documented columns so that regime=all output
// stays separable.
void WriteAlignment(const std::filesystem::path& path,
                    const std::vector<AlignmentRecord>& alignment) {
  CsvWriter csv(path,
                {"run_id", "block", "pair_type", "agent_a", "agent_b", "aligned", "regime", "target"});
  for (const auto& a : alignment) {
    csv.Field(a.run_id)
        .Field(a.block)
        .Field(PairTypeName(a.pair_type))
        .Field(a.agent_a)
        .Field(a.agent_b)
        .Field(a.aligned ? 1 : 0)
        .Field(RegimeName(a.regime))
        .Field(a.target.index);
    csv.EndRow();
  }
  csv.Close();
}

void WriteSummary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  CsvWriter csv(path, {"sim", "regime", "trial", "mean", "ci_low", "ci_high", "metric"});
  for (const auto& r : rows) {
    csv.Field(r.sim).Field(r.regime).Field(r.trial).Field(r.mean).Field(r.ci_low).Field(r.ci_high)
        .Field(r.metric);
    csv.EndRow();
  }
  csv.Close();
}

void WriteManifest(const std::filesystem::path& path, const RunConfig& config) {
  auto doc = ToJson(config);
  doc["tool_version"] = kToolVersion;
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  out.close();
  if (!out) throw ConventionError("error writing " + path.string());
}

}  // namespace

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> d;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) d.push_back(std::string(name) + " must be positive");
  };
  if (!OneOf(c.sim, {"sim1", "sim2", "sim3"})) d.push_back("sim must be sim1, sim2 or sim3");
  if (!OneOf(c.regime, {"partial", "complete", "none", "all"})) {
    d.push_back("regime must be partial, complete, none or all");
  }
  if (c.n_runs < 2) d.push_back("n_runs must be at least 2 (intervals resample runs)");
  positive("n_steps", c.n_steps);
  positive("learning_rate", c.learning_rate);
  positive("n_mc_elbo", c.n_mc_elbo);
  positive("n_mc_predictive", c.n_mc_predictive);
  if (!(c.average_fraction > 0.0 && c.average_fraction <= 1.0)) {
    d.push_back("average_fraction must lie in (0, 1]");
  }
  positive("w_I", c.w_I);
  if (!(c.w_C >= 0.0) || !std::isfinite(c.w_C)) d.push_back("w_C must be nonnegative");
  positive("theta_prior_std", c.theta_prior_std);
  positive("phi_drift_std", c.phi_drift_std);
  if (!std::isfinite(c.bias)) d.push_back("bias must be finite");
  if (c.n_partners < 0) d.push_back("n_partners must be nonnegative");
  positive("trials_per_partner", c.trials_per_partner);
  if (c.n_agents < 2 || c.n_agents % 2 != 0) d.push_back("n_agents must be even and at least 2");
  positive("trials_per_pair", c.trials_per_pair);
  if (!OneOf(c.alignment, {"modal", "sampled"})) d.push_back("alignment must be modal or sampled");
  positive("n_bootstrap", c.n_bootstrap);
  positive("workers", c.workers);
  return d;
}

nlohmann::json ToJson(const RunConfig& config) {
  nlohmann::json doc;
  ForEachField(config, [&](const char* name, const auto& field) { doc[name] = field; });
  return doc;
}

RunConfig FromJson(const nlohmann::json& doc, RunConfig base) {
  if (!doc.is_object()) throw ConventionError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "tool_version") continue;
    bool found = false;
    ForEachField(base, [&](const char* name, auto& field) {
      if (key == name) {
        AssignJson(key, value, field);
        found = true;
      }
    });
    if (!found) throw ConventionError("unknown config key '" + key + "'");
  }
  return base;
}

RunConfig LoadConfigFile(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConventionError("cannot read config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConventionError("config file " + path + ": " + e.what());
  }
  return FromJson(doc, std::move(base));
}

void ApplyOverride(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConventionError("override '" + assignment + "' is not key=value");
  }
  const auto key = assignment.substr(0, eq);
  const auto text = assignment.substr(eq + 1);
  bool found = false;
  ForEachField(config, [&](const char* name, auto& field) {
    if (key == name) {
      AssignText(key, text, field);
      found = true;
    }
  });
  if (!found) throw ConventionError("unknown config key '" + key + "'");
}

std::string FormatNumber(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

int run(const RunConfig& config, std::ostream& err) {
  const auto diagnostics = validate(config);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics) err << "invalid config: " << d << '\n';
    return 2;
  }
  if (config.output_dir.empty()) {
    err << "invalid config: output_dir is required\n";
    return 2;
  }
  const std::filesystem::path out_dir(config.output_dir);
  std::error_code ec;
  if (!std::filesystem::is_directory(out_dir, ec)) {
    err << "invalid config: output_dir " << config.output_dir << " is not an existing directory\n";
    return 2;
  }

  try {
    const Sim sim = ParseSim(config.sim);
    FitConfig fit_cfg;
    fit_cfg.n_steps = config.n_steps;
    fit_cfg.learning_rate = config.learning_rate;
    fit_cfg.n_mc_elbo = config.n_mc_elbo;
    fit_cfg.n_mc_predictive = config.n_mc_predictive;
    fit_cfg.average_fraction = config.average_fraction;
    fit_cfg.seed = config.seed;
    const RsaConfig rsa_cfg = ScenarioRsa(sim, config.w_I, config.w_C);
    PriorSpec prior = ScenarioPrior(sim, config.bias);
    prior.theta_prior_std = config.theta_prior_std;
    prior.phi_drift_std = config.phi_drift_std;
    ScenarioOptions options;
    options.n_partners = config.n_partners;
    options.trials_per_partner = config.trials_per_partner;
    options.n_agents = config.n_agents;
    options.trials_per_pair = config.trials_per_pair;
    options.alignment = config.alignment == "sampled" ? AlignmentMode::kSampled : AlignmentMode::kModal;
    options.workers = config.workers;

    // Every regime sees the same seed, so runs differ only by pooling.
    SimResult result;
    for (const auto regime : Regimes(config.regime)) {
      SimResult part;
      switch (sim) {
        case Sim::kSim1:
          part.trials = run_sim1(fit_cfg, prior, rsa_cfg, regime, config.n_runs, config.seed, options);
          break;
        case Sim::kSim2:
          part.trials = run_sim2(fit_cfg, prior, rsa_cfg, regime, config.n_runs, config.seed, options);
          break;
        case Sim::kSim3:
          part = run_sim3(fit_cfg, prior, rsa_cfg, regime, config.n_runs, config.seed, options);
          break;
      }
      result.trials.insert(result.trials.end(), part.trials.begin(), part.trials.end());
      result.alignment.insert(result.alignment.end(), part.alignment.begin(), part.alignment.end());
    }

    auto samples = TrialMetrics(result.trials);
    const auto aligned = AlignmentMetrics(result.alignment);
    samples.insert(samples.end(), aligned.begin(), aligned.end());
    const auto summary = summarize(samples, config.n_bootstrap, config.seed);

    WriteTrials(out_dir / "trials.csv", result.trials);
    if (sim == Sim::kSim3) WriteAlignment(out_dir / "alignment.csv", result.alignment);
    WriteSummary(out_dir / "summary.csv", summary);
    WriteManifest(out_dir / "manifest.json", config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace convention
