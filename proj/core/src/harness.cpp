#include "spt/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "spt/learner.hpp"
#include "spt/pointmass.hpp"

namespace fs = std::filesystem;

namespace spt {

namespace {

using nlohmann::json;

constexpr std::uint64_t kStreamPretrain = 0x7072652d7472ULL;  // "pre-tr"
constexpr std::uint64_t kStreamFinetune = 0x66696e652d74ULL;  // "fine-t"

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// All run artifacts are written atomically: tmp file + rename.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::unique_ptr<Env> make_env(const ExperimentConfig& cfg, bool test_model) {
  if (cfg.env.type == "pointmass") {
    return std::make_unique<PointMassEnv>(PointMassModel{}, cfg.env.angle_range);
  }
  const ArmModel model =
      test_model ? make_test_model(cfg.env.mass_factor, cfg.env.damping_factor,
                                   cfg.env.inertia_factor)
                 : make_train_model();
  return std::make_unique<ArmEnv>(model, cfg.env.angle_range);
}

SafetySpec make_spec(const ExperimentConfig& cfg) {
  return SafetySpec{cfg.env.u_lim, cfg.env.u_prime_lim, cfg.env.lambda_penalty};
}

double mean_shaped_return(const RolloutBatch& batch) {
  double s = 0.0;
  for (const auto& t : batch.trajectories) s += t.shaped_return();
  return s / static_cast<double>(batch.trajectories.size());
}

double mean_base_return(const RolloutBatch& batch) {
  double s = 0.0;
  for (const auto& t : batch.trajectories) s += t.base_return();
  return s / static_cast<double>(batch.trajectories.size());
}

struct PretrainResult {
  PolicyParams policy;
  // rows: iteration, mean shaped return, mean base return, achieved KL
  std::vector<std::array<double, 4>> records;
};

// Cache key covers everything pre-training depends on besides the seed.
std::string pretrain_cache_key(const ExperimentConfig& cfg) {
  json j;
  j["env"] = {cfg.env.type,        cfg.env.u_lim,
              cfg.env.u_prime_lim, cfg.env.lambda_penalty,
              cfg.env.horizon,     cfg.env.angle_range};
  j["learner"] = {cfg.learner.gamma,
                  cfg.learner.lambda_gae,
                  cfg.learner.delta_kl_pretrain,
                  cfg.learner.episodes_per_batch_pretrain,
                  cfg.learner.pretrain_iterations,
                  cfg.learner.initial_std};
  j["safety_range"] = {cfg.safety.t_min, cfg.safety.t_max};
  std::ostringstream key;
  key << std::hex << std::hash<std::string>{}(j.dump());
  return key.str();
}

PolicyParams initial_policy(const ExperimentConfig& cfg, const Env& env) {
  return PolicyParams(env.action_dim(), env.feature_dim(),
                      cfg.learner.initial_std);
}

PretrainResult run_pretrain(const ExperimentConfig& cfg, std::uint64_t seed) {
  auto env = make_env(cfg, /*test_model=*/false);
  const SafetySpec spec = make_spec(cfg);
  const GaeConfig gae{cfg.learner.gamma, cfg.learner.lambda_gae};
  PretrainResult result{initial_policy(cfg, *env), {}};
  for (int k = 0; k < cfg.learner.pretrain_iterations; ++k) {
    Rng rng = make_rng(seed, kStreamPretrain, static_cast<std::uint64_t>(k));
    RolloutBatch batch = collect_randomized_limit(
        result.policy, *env, spec, cfg.safety.t_min, cfg.safety.t_max,
        cfg.learner.episodes_per_batch_pretrain, cfg.env.horizon, rng);
    batch.policy_snapshot = k;
    const LinearBaseline baseline = LinearBaseline::fit(batch, gae);
    const auto adv = gae_advantages(batch, gae, baseline.as_value_fn());
    const Eigen::VectorXd grad = policy_gradient(batch, adv, result.policy);
    UpdateResult upd = kl_constrained_update(result.policy, grad, batch,
                                             cfg.learner.delta_kl_pretrain);
    result.records.push_back({static_cast<double>(k), mean_shaped_return(batch),
                              mean_base_return(batch), upd.achieved_kl});
    result.policy = std::move(upd.params);
  }
  return result;
}

PretrainResult load_or_run_pretrain(const ExperimentConfig& cfg,
                                    std::uint64_t seed, const fs::path& out_dir) {
  const fs::path cache_dir = out_dir / "checkpoints";
  fs::create_directories(cache_dir);
  const fs::path cache =
      cache_dir / ("pretrain_seed" + std::to_string(seed) + "_" +
                   pretrain_cache_key(cfg) + ".json");
  // Pre-training is variant-independent, so concurrent jobs of the same seed
  // serialize on the cache file.
  static std::mutex cache_mutex;
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (fs::exists(cache)) {
    const json j = json::parse(read_file(cache));
    PretrainResult result{policy_from_json(j.at("policy").dump()), {}};
    for (const auto& row : j.at("records")) {
      result.records.push_back(
          {row.at(0).get<double>(), row.at(1).get<double>(),
           row.at(2).get<double>(), row.at(3).get<double>()});
    }
    return result;
  }
  PretrainResult result = run_pretrain(cfg, seed);
  json j;
  j["policy"] = json::parse(policy_to_json(result.policy));
  j["records"] = json::array();
  for (const auto& row : result.records) {
    j["records"].push_back({row[0], row[1], row[2], row[3]});
  }
  write_file_atomic(cache, j.dump());
  return result;
}

void write_pretrain_csv(const fs::path& run_dir, const PretrainResult& pre) {
  std::ostringstream out;
  out << "iteration,mean_return,mean_base_return,achieved_kl\n";
  for (const auto& row : pre.records) {
    out << static_cast<int>(row[0]) << ',' << format_double(row[1]) << ','
        << format_double(row[2]) << ',' << format_double(row[3]) << '\n';
  }
  write_file_atomic(run_dir / "pretrain.csv", out.str());
}

struct Checkpoint {
  std::string phase = "finetune";  // finetune | done
  int next_iteration = 0;
  double t_lim = 0.0;
  PolicyParams policy{1, 1, 1.0};  // placeholder until assigned
};

void write_checkpoint(const fs::path& run_dir, const Checkpoint& ck) {
  json j;
  j["phase"] = ck.phase;
  j["next_iteration"] = ck.next_iteration;
  j["t_lim"] = ck.t_lim;
  j["policy"] = json::parse(policy_to_json(ck.policy));
  write_file_atomic(run_dir / "checkpoint.json", j.dump());
}

Checkpoint read_checkpoint(const fs::path& run_dir) {
  const json j = json::parse(read_file(run_dir / "checkpoint.json"));
  Checkpoint ck{j.at("phase").get<std::string>(),
                j.at("next_iteration").get<int>(), j.at("t_lim").get<double>(),
                policy_from_json(j.at("policy").dump())};
  return ck;
}

// Rewrites iterations.csv with only the first n data rows; used when a job
// resumes from a checkpoint that predates rows already on disk.
void truncate_iterations_csv(const fs::path& csv, int n) {
  if (!fs::exists(csv)) {
    write_file_atomic(csv, std::string(kIterationsCsvHeader) + "\n");
    return;
  }
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::ostringstream out;
  out << kIterationsCsvHeader << '\n';
  for (int i = 0; i < n && std::getline(in, line); ++i) {
    out << line << '\n';
  }
  in.close();
  write_file_atomic(csv, out.str());
}

void write_meta(const fs::path& run_dir, const Job& job,
                const ExperimentConfig& cfg) {
  json j;
  j["run_id"] = job.run_id;
  j["seed"] = job.seed;
  j["variant"] = to_string(job.variant);
  j["d_safe"] = job.d_safe;
  j["delta_kl_finetune"] = cfg.learner.delta_kl_finetune;
  write_file_atomic(run_dir / "meta.json", j.dump(2));
}

void run_job(const ExperimentConfig& cfg, const Job& job,
             const fs::path& out_dir, const RunOptions& opts) {
  const fs::path run_dir = out_dir / "runs" / job.run_id;
  fs::create_directories(run_dir);
  write_meta(run_dir, job, cfg);

  SafetyConfig safety = cfg.safety;
  safety.variant = job.variant;
  safety.d_safe = job.d_safe;
  safety.validate();

  const fs::path ck_path = run_dir / "checkpoint.json";
  Checkpoint ck;
  if (fs::exists(ck_path)) {
    ck = read_checkpoint(run_dir);
    if (ck.phase == "done") return;
  } else {
    PretrainResult pre = load_or_run_pretrain(cfg, job.seed, out_dir);
    write_pretrain_csv(run_dir, pre);
    write_file_atomic(run_dir / "policy_pretrained.json",
                      policy_to_json(pre.policy));
    ck = Checkpoint{"finetune", 0, job.t_init, std::move(pre.policy)};
    write_checkpoint(run_dir, ck);
  }

  const fs::path csv = run_dir / "iterations.csv";
  truncate_iterations_csv(csv, ck.next_iteration);

  auto env = make_env(cfg, /*test_model=*/true);
  const SafetySpec spec = make_spec(cfg);
  const GaeConfig gae{cfg.learner.gamma, cfg.learner.lambda_gae};

  int last = cfg.learner.finetune_iterations;
  if (opts.stop_after_finetune >= 0) {
    last = std::min(last, ck.next_iteration + opts.stop_after_finetune);
  }

  std::ofstream csv_out(csv, std::ios::app);
  for (int k = ck.next_iteration; k < last; ++k) {
    Rng rng = make_rng(job.seed, kStreamFinetune, static_cast<std::uint64_t>(k));
    RolloutBatch batch =
        collect(ck.policy, *env, spec, ck.t_lim,
                cfg.learner.episodes_per_batch_finetune, cfg.env.horizon, rng);
    batch.seed = job.seed;
    batch.policy_snapshot = k;

    const LinearBaseline baseline = LinearBaseline::fit(batch, gae);
    const auto adv = gae_advantages(batch, gae, baseline.as_value_fn());
    const Eigen::VectorXd grad = policy_gradient(batch, adv, ck.policy);
    UpdateResult upd = kl_constrained_update(ck.policy, grad, batch,
                                             cfg.learner.delta_kl_finetune);
    const SafetyReport report = run_iteration(upd.params, batch, ck.t_lim,
                                              safety,
                                              cfg.learner.delta_kl_finetune);

    IterationRecord rec;
    rec.run_id = job.run_id;
    rec.seed = job.seed;
    rec.variant = job.variant;
    rec.iteration = k;
    rec.t_lim = ck.t_lim;
    rec.p_u = report.p_u;
    rec.delta_pu1 = report.delta_pu1;
    rec.delta_pu2 = report.delta_pu2;
    rec.p_u_pred = report.p_u_pred;
    rec.expected_damage = report.expected_damage;
    rec.mean_return = mean_shaped_return(batch);
    rec.mean_base_return = mean_base_return(batch);
    rec.achieved_kl = upd.achieved_kl;
    csv_out << to_csv_row(rec) << '\n';
    csv_out.flush();

    ck.policy = std::move(upd.params);
    ck.t_lim = report.t_lim_next;
    ck.next_iteration = k + 1;
    write_checkpoint(run_dir, ck);
  }
  csv_out.close();

  if (ck.next_iteration >= cfg.learner.finetune_iterations) {
    write_file_atomic(run_dir / "policy_final.json", policy_to_json(ck.policy));
    ck.phase = "done";
    write_checkpoint(run_dir, ck);
  }
}

int resolve_workers(const RunOptions& opts) {
  if (opts.max_workers > 0) return opts.max_workers;
  if (const char* env = std::getenv("SPT_MAX_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string trimmed_double(double v) { return format_double(v); }

}  // namespace

std::vector<Job> expand_jobs(const ExperimentConfig& cfg) {
  std::vector<Variant> variants;
  std::vector<double> dsafes{cfg.safety.d_safe};
  if (cfg.preset == "adaptive_vs_fixed") {
    variants = {Variant::full, Variant::fixed_limit};
  } else if (cfg.preset == "ablation") {
    variants = {Variant::full, Variant::v2_no_dpu1, Variant::v3_no_dpu2,
                Variant::v4_neither};
  } else if (cfg.preset == "dsafe_sweep") {
    variants = {Variant::full};
    dsafes = cfg.dsafe_sweep;
  } else {
    variants = {cfg.safety.variant};
  }

  std::vector<Job> jobs;
  for (const Variant v : variants) {
    for (const double d : dsafes) {
      for (const std::uint64_t seed : cfg.seeds) {
        Job job;
        job.variant = v;
        job.seed = seed;
        job.d_safe = d;
        job.t_init = v == Variant::fixed_limit ? cfg.safety.t_max
                                               : cfg.safety.t_min;
        job.run_id = to_string(v);
        if (dsafes.size() > 1) job.run_id += "_dsafe" + trimmed_double(d);
        job.run_id += "_seed" + std::to_string(seed);
        jobs.push_back(std::move(job));
      }
    }
  }
  return jobs;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_csv_row(const IterationRecord& rec) {
  std::ostringstream out;
  out << rec.run_id << ',' << rec.seed << ',' << to_string(rec.variant) << ','
      << rec.iteration << ',' << format_double(rec.t_lim) << ','
      << format_double(rec.p_u) << ',' << format_double(rec.delta_pu1) << ','
      << format_double(rec.delta_pu2) << ',' << format_double(rec.p_u_pred)
      << ',' << format_double(rec.expected_damage) << ','
      << format_double(rec.mean_return) << ','
      << format_double(rec.achieved_kl);
  return out.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{}) {
    throw std::runtime_error("bad number '" + s + "' in " + context);
  }
  return v;
}

}  // namespace

std::vector<IterationRecord> read_iterations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty iterations csv " + path);
  }
  if (line != kIterationsCsvHeader) {
    throw std::runtime_error("unexpected header in " + path);
  }
  std::vector<IterationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) {
      throw std::runtime_error("malformed row in " + path + ": " + line);
    }
    IterationRecord rec;
    rec.run_id = f[0];
    rec.seed = std::stoull(f[1]);
    rec.variant = variant_from_string(f[2]);
    rec.iteration = std::stoi(f[3]);
    rec.t_lim = parse_double(f[4], path);
    rec.p_u = parse_double(f[5], path);
    rec.delta_pu1 = parse_double(f[6], path);
    rec.delta_pu2 = parse_double(f[7], path);
    rec.p_u_pred = parse_double(f[8], path);
    rec.expected_damage = parse_double(f[9], path);
    rec.mean_return = parse_double(f[10], path);
    rec.achieved_kl = parse_double(f[11], path);
    records.push_back(std::move(rec));
  }
  return records;
}

void run_experiment(const ExperimentConfig& raw_cfg, const std::string& out_dir,
                    const RunOptions& opts) {
  const ExperimentConfig cfg = apply_preset(raw_cfg);
  cfg.validate();
  const fs::path out(out_dir);
  fs::create_directories(out / "runs");
  write_file_atomic(out / "config.json", cfg.to_json());

  const std::vector<Job> jobs = expand_jobs(cfg);
  const int workers = std::min<int>(resolve_workers(opts),
                                    static_cast<int>(jobs.size()));

  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::string first_error;
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        if (!opts.quiet) {
          std::lock_guard<std::mutex> lock(err_mutex);
          std::cout << "[spt] running " << jobs[i].run_id << std::endl;
        }
        run_job(cfg, jobs[i], out, opts);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty()) {
          first_error = jobs[i].run_id + ": " + e.what();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!first_error.empty()) {
    throw std::runtime_error("run failed: " + first_error);
  }
}

namespace {

struct RunData {
  std::string run_id;
  Variant variant = Variant::full;
  double d_safe = 0.5;
  double delta_kl = 0.05;
  std::vector<IterationRecord> records;
  double final_t_lim = -1.0;  // t_lim_next of the last iteration, if known
};

std::vector<RunData> load_runs(const fs::path& out_dir) {
  std::vector<RunData> runs;
  const fs::path runs_dir = out_dir / "runs";
  if (!fs::exists(runs_dir)) {
    throw std::runtime_error("no runs directory under " + out_dir.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(runs_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    RunData run;
    run.run_id = dir.filename().string();
    if (fs::exists(dir / "meta.json")) {
      const json meta = json::parse(read_file(dir / "meta.json"));
      run.variant = variant_from_string(meta.at("variant").get<std::string>());
      run.d_safe = meta.at("d_safe").get<double>();
      run.delta_kl = meta.value("delta_kl_finetune", 0.05);
    }
    if (fs::exists(dir / "iterations.csv")) {
      run.records = read_iterations_csv((dir / "iterations.csv").string());
    }
    if (fs::exists(dir / "checkpoint.json")) {
      const json ck = json::parse(read_file(dir / "checkpoint.json"));
      const int next_iter = ck.at("next_iteration").get<int>();
      if (!run.records.empty() &&
          next_iter == run.records.back().iteration + 1) {
        run.final_t_lim = ck.at("t_lim").get<double>();
      }
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace

void emit_csv(const std::string& out_dir) {
  const fs::path out(out_dir);
  const fs::path runs_dir = out / "runs";
  if (!fs::exists(runs_dir)) {
    throw std::runtime_error("no runs directory under " + out_dir);
  }
  for (const auto& entry : fs::directory_iterator(runs_dir)) {
    if (!entry.is_directory()) continue;
    const fs::path csv = entry.path() / "iterations.csv";
    if (!fs::exists(csv)) {
      write_file_atomic(csv, std::string(kIterationsCsvHeader) + "\n");
    }
  }

  const auto runs = load_runs(out);
  // (variant, d_safe) -> iteration -> samples
  std::map<std::pair<std::string, double>, std::map<int, std::vector<const IterationRecord*>>>
      groups;
  for (const auto& run : runs) {
    for (const auto& rec : run.records) {
      groups[{to_string(run.variant), run.d_safe}][rec.iteration].push_back(&rec);
    }
  }

  std::ostringstream s;
  s << "variant,d_safe,iteration,n_seeds,t_lim_mean,t_lim_var,p_u_mean,p_u_var,"
       "expected_damage_mean,expected_damage_var,mean_return_mean,"
       "mean_return_var\n";
  auto mean_var = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return std::pair<double, double>{mean, var};
  };
  for (const auto& [key, by_iter] : groups) {
    for (const auto& [iter, recs] : by_iter) {
      std::vector<double> t_lim, p_u, damage, ret;
      for (const auto* r : recs) {
        t_lim.push_back(r->t_lim);
        p_u.push_back(r->p_u);
        damage.push_back(r->expected_damage);
        ret.push_back(r->mean_return);
      }
      const auto [tm, tv] = mean_var(t_lim);
      const auto [pm, pv] = mean_var(p_u);
      const auto [dm, dv] = mean_var(damage);
      const auto [rm, rv] = mean_var(ret);
      s << key.first << ',' << format_double(key.second) << ',' << iter << ','
        << recs.size() << ',' << format_double(tm) << ',' << format_double(tv)
        << ',' << format_double(pm) << ',' << format_double(pv) << ','
        << format_double(dm) << ',' << format_double(dv) << ','
        << format_double(rm) << ',' << format_double(rv) << '\n';
    }
  }
  write_file_atomic(out / "summary.csv", s.str());
}

int verify_runs(const std::string& out_dir, double d_safe, std::ostream& out) {
  const auto runs = load_runs(fs::path(out_dir));
  bool constructive_ok = true;
  int adaptive_runs = 0;
  for (const auto& run : runs) {
    const bool adaptive = run.variant != Variant::fixed_limit;
    int empirical_ok = 0;
    bool run_constructive = true;
    for (size_t i = 0; i < run.records.size(); ++i) {
      const auto& rec = run.records[i];
      if (rec.expected_damage <= d_safe + 1e-12) ++empirical_ok;
      if (adaptive) {
        double t_next = -1.0;
        if (i + 1 < run.records.size()) {
          t_next = run.records[i + 1].t_lim;
        } else if (run.final_t_lim > 0.0) {
          t_next = run.final_t_lim;
        }
        if (t_next > 0.0 &&
            rec.p_u_pred * t_next > run.d_safe + 1e-12) {
          run_constructive = false;
        }
      }
    }
    const double frac =
        run.records.empty()
            ? 1.0
            : static_cast<double>(empirical_ok) /
                  static_cast<double>(run.records.size());
    out << "run " << run.run_id << ": iterations=" << run.records.size()
        << " empirical_within_budget=" << format_double(100.0 * frac) << "%";
    if (adaptive) {
      ++adaptive_runs;
      out << " constructive=" << (run_constructive ? "OK" : "FAIL");
      if (!run_constructive) constructive_ok = false;
    } else {
      out << " constructive=n/a(fixed_limit)";
    }
    out << '\n';
  }
  out << "constructive invariant: "
      << (constructive_ok ? "OK" : "FAIL") << " across " << adaptive_runs
      << " adaptive run(s)\n";
  return constructive_ok ? 0 : 1;
}

}  // namespace spt
