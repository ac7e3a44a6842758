#ifndef SPT_HARNESS_HPP_
#define SPT_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spt/config.hpp"

namespace spt {

// One (variant, d_safe, seed) job of an experiment.
struct Job {
  std::string run_id;
  std::uint64_t seed = 0;
  Variant variant = Variant::full;
  double d_safe = 0.5;
  double t_init = 0.1;  // t_min for adaptive variants, t_max for fixed_limit
};

std::vector<Job> expand_jobs(const ExperimentConfig& cfg);

struct RunOptions {
  // Test hook: stop each fine-tune loop after this many additional
  // iterations (checkpoint intact), -1 = run to completion.
  int stop_after_finetune = -1;
  // 0 = use SPT_MAX_WORKERS from the environment, else hardware concurrency.
  int max_workers = 0;
  bool quiet = true;
};

// Pinned iterations.csv schema.
inline constexpr const char* kIterationsCsvHeader =
    "run_id,seed,variant,iteration,t_lim,p_u,delta_pu1,delta_pu2,p_u_pred,"
    "expected_damage,mean_return,achieved_kl";

struct IterationRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  Variant variant = Variant::full;
  int iteration = 0;
  double t_lim = 0.0;
  double p_u = 0.0;
  double delta_pu1 = 0.0;
  double delta_pu2 = 0.0;
  double p_u_pred = 0.0;
  double expected_damage = 0.0;
  double mean_return = 0.0;       // mean shaped episode return
  double mean_base_return = 0.0;  // kept in memory / checkpoints, not in CSV
  double achieved_kl = 0.0;
};

std::string to_csv_row(const IterationRecord& rec);
std::vector<IterationRecord> read_iterations_csv(const std::string& path);

// Shortest round-trip decimal rendering (std::to_chars); CSV values parse
// back to the exact doubles that were written.
std::string format_double(double v);

// Runs every job of the (preset-expanded) config under out_dir. Each seed and
// variant is an independent deterministic job; jobs resume from their last
// checkpoint if interrupted. Layout:
//   out_dir/config.json            resolved configuration
//   out_dir/checkpoints/           pre-trained policies, shared per seed
//   out_dir/runs/<run_id>/         meta.json, iterations.csv, pretrain.csv,
//                                  checkpoint.json, policy_*.json
void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                    const RunOptions& opts = {});

// Ensures every run has an iterations.csv (header-only if no records) and
// writes out_dir/summary.csv with per-(variant, d_safe) per-iteration mean
// and population variance across seeds.
void emit_csv(const std::string& out_dir);

// Audits all runs under out_dir: the fraction of iterations whose empirical
// expected damage stayed within d_safe, and whether the constructive bound
// p_u_pred * t_lim_next <= run's own d_safe held at every iteration of every
// adaptive run. Returns 0 if the constructive invariant held, 1 otherwise.
int verify_runs(const std::string& out_dir, double d_safe, std::ostream& out);

}  // namespace spt

#endif  // SPT_HARNESS_HPP_
