#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rramprog/harness.hpp"

namespace rramprog {

// Interval plan whose min_half_width is two read LSBs of `crossbar`.
IntervalPlan default_interval_plan(const CrossbarConfig &crossbar = {});

/// Everything a run needs, with every default resolved.
///
/// The on-disk form is one `dotted.key = value` per line; `#` starts a comment.
/// Lists are comma separated, intervals are written `low:high`.
struct RunConfig {
  CrossbarConfig crossbar;
  IntervalPlan interval_plan = default_interval_plan();
  std::vector<TargetInterval> interval_table; // overrides interval_plan when non-empty

  std::vector<PolicyVariant> policies{PolicyVariant::Naive, PolicyVariant::RelaxAware};
  SimTime delta_t = SimTime::from_ms(5'000);
  int max_iterations = 200;
  int cp_floor = 0;

  int replicas = 20;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds; // explicit manifest; overrides seed/replicas
  std::vector<double> checkpoints_s{0.0, 5.0, 1000.0};
  AssignmentMode assignment_mode = AssignmentMode::UniformPerState;
  Assignment pattern;
  double k_sigma = 1.0;
  int threads = 1;

  std::string output_dir; // empty: use the CLI default

  ProgramPolicy policy(PolicyVariant variant) const;
  std::vector<std::uint64_t> seed_manifest() const;
  std::vector<TargetInterval> intervals() const;
  ExperimentConfig experiment() const;

  // Throws ValidationError.
  void validate() const;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

// Throws ParseError(line, key) or ValidationError.
RunConfig parse_config_text(const std::string &text);
RunConfig parse_config(const std::filesystem::path &path);

// Canonical text form; parse_config_text(emit_config(c)) == c.
std::string emit_config(const RunConfig &config);

// Every key the parser accepts, in emission order.
std::vector<std::string> config_keys();

PolicyVariant parse_policy_variant(const std::string &text);

} // namespace rramprog
