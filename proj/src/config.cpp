#include "rramprog/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace rramprog {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

// Thrown by value converters; turned into a ParseError with line/key context.
struct BadValue {
  std::string why;
};

template <typename T> T parse_number(const std::string &s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw BadValue{"not a number: '" + s + "'"};
  return v;
}

template <typename T> std::string format_number(T v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool parse_bool(const std::string &s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw BadValue{"expected true or false, got '" + s + "'"};
}

std::string join(const std::vector<std::string> &items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

struct Key {
  std::string name;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

template <typename T> Key number_key(std::string name, T RunConfig::*member) {
  return {std::move(name), [member](RunConfig &c, const std::string &v) { c.*member = parse_number<T>(v); },
          [member](const RunConfig &c) { return format_number(c.*member); }};
}

// Binds a key to a field reached through an accessor.
template <typename T, typename Access> Key field_key(std::string name, Access access) {
  return {std::move(name),
          [access](RunConfig &c, const std::string &v) { access(c) = parse_number<T>(v); },
          [access](const RunConfig &c) { return format_number(access(const_cast<RunConfig &>(c))); }};
}

template <typename Access> Key time_key(std::string name, Access access) {
  return {std::move(name),
          [access](RunConfig &c, const std::string &v) {
            const auto ns = parse_number<std::int64_t>(v);
            access(c) = SimTime::from_ns(ns);
          },
          [access](const RunConfig &c) { return format_number(access(const_cast<RunConfig &>(c)).ns()); }};
}

void add_bias_keys(std::vector<Key> &keys, const std::string &prefix,
                   std::function<LineBias &(RunConfig &)> bias) {
  keys.push_back(field_key<double>(prefix + ".v_wl", [bias](RunConfig &c) -> double & { return bias(c).v_wl; }));
  keys.push_back(field_key<double>(prefix + ".v_sl", [bias](RunConfig &c) -> double & { return bias(c).v_sl; }));
  keys.push_back(field_key<double>(prefix + ".v_bl", [bias](RunConfig &c) -> double & { return bias(c).v_bl; }));
}

void add_operation_keys(std::vector<Key> &keys, const std::string &name,
                        OperationProtocol ProtocolTable::*op) {
  const std::string p = "protocol." + name;
  add_bias_keys(keys, p + ".active", [op](RunConfig &c) -> LineBias & { return (c.crossbar.protocol.*op).active; });
  add_bias_keys(keys, p + ".inactive", [op](RunConfig &c) -> LineBias & { return (c.crossbar.protocol.*op).inactive; });
  keys.push_back(field_key<std::int64_t>(p + ".width_ns", [op](RunConfig &c) -> std::int64_t & {
    return (c.crossbar.protocol.*op).width_ns;
  }));
  keys.push_back(field_key<double>(p + ".compliance_ua", [op](RunConfig &c) -> double & {
    return (c.crossbar.protocol.*op).compliance_ua;
  }));
}

const std::vector<Key> &key_table() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
#define RR_DEVICE(field) k.push_back(field_key<decltype(DeviceParams::field)>("device." #field, [](RunConfig &c) -> auto & { return c.crossbar.device.field; }))
    RR_DEVICE(g_floor);
    RR_DEVICE(g_on_median);
    RR_DEVICE(g_on_dispersion);
    RR_DEVICE(g_on_d2d_sigma);
    RR_DEVICE(forming_factor);
    RR_DEVICE(tau_erase_median);
    RR_DEVICE(tau_erase_d2d_sigma);
    RR_DEVICE(erase_noise_frac);
    RR_DEVICE(relax_tau_short);
    RR_DEVICE(relax_sigma_short);
    RR_DEVICE(relax_sigma_long);
    RR_DEVICE(relax_tau_long);
    RR_DEVICE(read_noise_frac);
    RR_DEVICE(g_pristine);
    RR_DEVICE(master_seed);
#undef RR_DEVICE
    k.push_back(field_key<int>("array.rows", [](RunConfig &c) -> int & { return c.crossbar.rows; }));
    k.push_back(field_key<int>("array.cols", [](RunConfig &c) -> int & { return c.crossbar.cols; }));

    add_operation_keys(k, "form", &ProtocolTable::form);
    add_operation_keys(k, "write", &ProtocolTable::write);
    add_operation_keys(k, "erase", &ProtocolTable::erase);
    add_operation_keys(k, "read", &ProtocolTable::read);
    add_bias_keys(k, "protocol.standby", [](RunConfig &c) -> LineBias & { return c.crossbar.protocol.standby; });
    k.push_back(field_key<double>("protocol.vdd", [](RunConfig &c) -> double & { return c.crossbar.protocol.vdd; }));

    k.push_back(field_key<double>("sense.r_sense_ohm", [](RunConfig &c) -> double & { return c.crossbar.sense.r_sense_ohm; }));
    k.push_back(field_key<int>("sense.adc_bits", [](RunConfig &c) -> int & { return c.crossbar.sense.adc_bits; }));
    k.push_back(field_key<double>("sense.adc_vref", [](RunConfig &c) -> double & { return c.crossbar.sense.adc_vref; }));
    k.push_back({"sense.quantize",
                 [](RunConfig &c, const std::string &v) { c.crossbar.sense.quantize = parse_bool(v); },
                 [](const RunConfig &c) { return std::string(c.crossbar.sense.quantize ? "true" : "false"); }});

    k.push_back(time_key("timing.iteration_overhead_ns", [](RunConfig &c) -> SimTime & { return c.crossbar.timing.iteration_overhead; }));
    k.push_back(time_key("timing.read_pulse_ns", [](RunConfig &c) -> SimTime & { return c.crossbar.timing.read_pulse; }));
    k.push_back(time_key("timing.form_pulse_ns", [](RunConfig &c) -> SimTime & { return c.crossbar.timing.form_pulse; }));
    k.push_back(time_key("timing.write_pulse_ns", [](RunConfig &c) -> SimTime & { return c.crossbar.timing.write_pulse; }));

    k.push_back({"intervals.scheme",
                 [](RunConfig &c, const std::string &v) {
                   if (v == "linear") c.interval_plan.scheme = IntervalScheme::Linear;
                   else if (v == "sigma") c.interval_plan.scheme = IntervalScheme::Sigma;
                   else if (v == "mixed") c.interval_plan.scheme = IntervalScheme::Mixed;
                   else throw BadValue{"expected linear, sigma or mixed"};
                 },
                 [](const RunConfig &c) {
                   switch (c.interval_plan.scheme) {
                   case IntervalScheme::Linear: return std::string("linear");
                   case IntervalScheme::Sigma: return std::string("sigma");
                   case IntervalScheme::Mixed: break;
                   }
                   return std::string("mixed");
                 }});
    k.push_back(field_key<int>("intervals.n_states", [](RunConfig &c) -> int & { return c.interval_plan.n_states; }));
    k.push_back(field_key<double>("intervals.g_min", [](RunConfig &c) -> double & { return c.interval_plan.g_min; }));
    k.push_back(field_key<double>("intervals.g_max", [](RunConfig &c) -> double & { return c.interval_plan.g_max; }));
    k.push_back(field_key<double>("intervals.gap_frac", [](RunConfig &c) -> double & { return c.interval_plan.gap_frac; }));
    k.push_back(field_key<double>("intervals.linear_weight", [](RunConfig &c) -> double & { return c.interval_plan.linear_weight; }));
    k.push_back(field_key<double>("intervals.sigma_weight", [](RunConfig &c) -> double & { return c.interval_plan.sigma_weight; }));
    k.push_back(field_key<double>("intervals.min_half_width", [](RunConfig &c) -> double & { return c.interval_plan.min_half_width; }));
    k.push_back({"intervals.table",
                 [](RunConfig &c, const std::string &v) {
                   c.interval_table.clear();
                   for (const auto &item : split(v, ',')) {
                     const auto colon = item.find(':');
                     if (colon == std::string::npos) throw BadValue{"interval '" + item + "' is not low:high"};
                     c.interval_table.push_back({static_cast<int>(c.interval_table.size()),
                                                 parse_number<double>(trim(item.substr(0, colon))),
                                                 parse_number<double>(trim(item.substr(colon + 1)))});
                   }
                 },
                 [](const RunConfig &c) {
                   std::vector<std::string> items;
                   for (const auto &t : c.interval_table) items.push_back(format_number(t.g_low) + ":" + format_number(t.g_high));
                   return join(items);
                 }});

    k.push_back({"policy.variants",
                 [](RunConfig &c, const std::string &v) {
                   c.policies.clear();
                   for (const auto &item : split(v, ',')) c.policies.push_back(parse_policy_variant(item));
                 },
                 [](const RunConfig &c) {
                   std::vector<std::string> items;
                   for (auto p : c.policies) items.emplace_back(to_string(p));
                   return join(items);
                 }});
    k.push_back(time_key("policy.delta_t_ns", [](RunConfig &c) -> SimTime & { return c.delta_t; }));
    k.push_back(number_key("policy.max_iterations", &RunConfig::max_iterations));
    k.push_back(number_key("policy.cp_floor", &RunConfig::cp_floor));

    k.push_back(number_key("experiment.replicas", &RunConfig::replicas));
    k.push_back(number_key("experiment.seed", &RunConfig::seed));
    k.push_back({"experiment.seeds",
                 [](RunConfig &c, const std::string &v) {
                   c.seeds.clear();
                   for (const auto &item : split(v, ',')) c.seeds.push_back(parse_number<std::uint64_t>(item));
                 },
                 [](const RunConfig &c) {
                   std::vector<std::string> items;
                   for (auto s : c.seeds) items.push_back(format_number(s));
                   return join(items);
                 }});
    k.push_back({"experiment.checkpoints_s",
                 [](RunConfig &c, const std::string &v) {
                   c.checkpoints_s.clear();
                   for (const auto &item : split(v, ',')) c.checkpoints_s.push_back(parse_number<double>(item));
                 },
                 [](const RunConfig &c) {
                   std::vector<std::string> items;
                   for (auto t : c.checkpoints_s) items.push_back(format_number(t));
                   return join(items);
                 }});
    k.push_back({"experiment.assignment",
                 [](RunConfig &c, const std::string &v) {
                   if (v == "uniform") c.assignment_mode = AssignmentMode::UniformPerState;
                   else if (v == "pattern") c.assignment_mode = AssignmentMode::Pattern;
                   else throw BadValue{"expected uniform or pattern"};
                 },
                 [](const RunConfig &c) {
                   return std::string(c.assignment_mode == AssignmentMode::Pattern ? "pattern" : "uniform");
                 }});
    k.push_back({"experiment.pattern",
                 [](RunConfig &c, const std::string &v) {
                   c.pattern.clear();
                   for (const auto &item : split(v, ',')) c.pattern.push_back(parse_number<int>(item));
                 },
                 [](const RunConfig &c) {
                   std::vector<std::string> items;
                   for (auto s : c.pattern) items.push_back(format_number(s));
                   return join(items);
                 }});
    k.push_back(number_key("experiment.k_sigma", &RunConfig::k_sigma));
    k.push_back(number_key("experiment.threads", &RunConfig::threads));
    k.push_back({"output.dir", [](RunConfig &c, const std::string &v) { c.output_dir = v; },
                 [](const RunConfig &c) { return c.output_dir; }});
    return k;
  }();
  return keys;
}

} // namespace

IntervalPlan default_interval_plan(const CrossbarConfig &crossbar) {
  IntervalPlan plan;
  plan.min_half_width = 2.0 * crossbar.sense.conductance_lsb_us(crossbar.protocol.read_bias());
  return plan;
}

PolicyVariant parse_policy_variant(const std::string &text) {
  if (text == "naive") return PolicyVariant::Naive;
  if (text == "relax-aware") return PolicyVariant::RelaxAware;
  throw Error(ErrorCode::ValidationError, "unknown policy '" + text + "' (expected naive or relax-aware)");
}

ProgramPolicy RunConfig::policy(PolicyVariant variant) const {
  ProgramPolicy p;
  p.variant = variant;
  p.delta_t = delta_t;
  p.max_iterations = max_iterations;
  p.cp_floor = cp_floor;
  return p;
}

std::vector<std::uint64_t> RunConfig::seed_manifest() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int r = 0; r < replicas; ++r) out.push_back(seed + static_cast<std::uint64_t>(r));
  return out;
}

std::vector<TargetInterval> RunConfig::intervals() const {
  if (!interval_table.empty()) {
    validate_intervals(interval_table);
    return interval_table;
  }
  return assign_intervals(interval_plan, relaxation_sigma_model(crossbar.device));
}

ExperimentConfig RunConfig::experiment() const {
  ExperimentConfig e;
  e.crossbar = crossbar;
  e.intervals = intervals();
  for (auto v : policies) e.policies.push_back(policy(v));
  e.seeds = seed_manifest();
  e.checkpoints_s = checkpoints_s;
  e.assignment_mode = assignment_mode;
  e.pattern = pattern;
  e.k_sigma = k_sigma;
  e.threads = threads;
  return e;
}

void RunConfig::validate() const {
  try {
    if (replicas < 1) throw Error(ErrorCode::ValidationError, "experiment.replicas must be >= 1");
    if (policies.empty()) throw Error(ErrorCode::ValidationError, "policy.variants must not be empty");
    experiment().validate();
  } catch (const Error &e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    throw Error(ErrorCode::ValidationError, e.what());
  }
}

RunConfig parse_config_text(const std::string &text) {
  RunConfig cfg;

  std::map<std::string, const Key *> by_name;
  for (const Key &k : key_table()) by_name[k.name] = &k;

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool min_half_width_set = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    auto fail = [&](const std::string &key, const std::string &why) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + (key.empty() ? "" : ", key '" + key + "'") + ": " + why);
    };
    if (eq == std::string::npos) fail("", "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) fail(key, "unknown key");
    if (!seen.insert(key).second) fail(key, "duplicate key");
    try {
      it->second->set(cfg, value);
    } catch (const BadValue &b) {
      fail(key, b.why);
    } catch (const Error &e) {
      fail(key, e.what());
    }
    if (key == "intervals.min_half_width") min_half_width_set = true;
  }
  if (!min_half_width_set) cfg.interval_plan.min_half_width = default_interval_plan(cfg.crossbar).min_half_width;
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const RunConfig &config) {
  std::string out;
  for (const Key &k : key_table()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key &k : key_table()) out.push_back(k.name);
  return out;
}

} // namespace rramprog
