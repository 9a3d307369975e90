#include "comonotone/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "comonotone/barrier.hpp"
#include "comonotone/comonotony_lab.hpp"
#include "comonotone/gaussian.hpp"
#include "comonotone/parallel.hpp"
#include "comonotone/peacock_lab.hpp"

namespace comonotone {

using json = nlohmann::json;

std::vector<ReportRow> ExperimentResult::violations() const {
  std::vector<ReportRow> out;
  for (const auto& r : rows)
    if (r.verdict == "violation") out.push_back(r);
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// strict JSON access

std::string loc(const std::string& ptr) { return ptr.empty() ? "/" : ptr; }
std::string at(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string at(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void require_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw ConfigError("expected an object at " + loc(ptr));
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ptr) {
  require_object(j, ptr);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' at " + loc(ptr));
}

const json& req(const json& j, const std::string& key, const std::string& ptr) {
  require_object(j, ptr);
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing required key '" + key + "' at " + loc(ptr));
  return *it;
}

double as_double(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw ConfigError("expected a number at " + ptr);
  return v.get<double>();
}

std::size_t as_size(const json& v, const std::string& ptr) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1e18) return static_cast<std::size_t>(d);
  }
  throw ConfigError("expected a non-negative integer at " + ptr);
}

std::string as_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw ConfigError("expected a string at " + ptr);
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& ptr) {
  if (!v.is_boolean()) throw ConfigError("expected a boolean at " + ptr);
  return v.get<bool>();
}

std::vector<double> as_doubles(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError("expected an array of numbers at " + ptr);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], at(ptr, i)));
  return out;
}

const json& as_array(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError("expected an array at " + ptr);
  return v;
}

double num(const json& j, const std::string& key, const std::string& ptr) {
  return as_double(req(j, key, ptr), at(ptr, key));
}

double num_or(const json& j, const std::string& key, double def, const std::string& ptr) {
  return j.contains(key) ? as_double(j.at(key), at(ptr, key)) : def;
}

std::size_t size_or(const json& j, const std::string& key, std::size_t def, const std::string& ptr) {
  return j.contains(key) ? as_size(j.at(key), at(ptr, key)) : def;
}

std::string str_or(const json& j, const std::string& key, const std::string& def, const std::string& ptr) {
  return j.contains(key) ? as_string(j.at(key), at(ptr, key)) : def;
}

/// Runs `fn`, turning library parameter errors into config errors at `ptr`.
template <class Fn>
auto guarded(const std::string& ptr, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw ConfigError(std::string(e.what()) + " (at " + loc(ptr) + ")");
  } catch (const StructuralError& e) {
    throw ConfigError(std::string(e.what()) + " (at " + loc(ptr) + ")");
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::size_t index) {
  return splitmix64(seed ^ splitmix64(0x5eed000000000000ULL + index));
}

// ---------------------------------------------------------------------------
// registry

struct RegistryEntry {
  const char* category;
  const char* name;
  const char* params;
  const char* note;
};

const RegistryEntry kRegistry[] = {
    {"process", "brownian_motion", "", "standard Brownian motion"},
    {"process", "bm_series", "n_terms", "truncated sine series of Brownian motion"},
    {"process", "brownian_bridge", "", "Brownian bridge on [0, T]"},
    {"process", "fbm", "H, method=cholesky|mvn, tail_cutoff, quad_steps", "fractional Brownian motion"},
    {"process", "liouville", "kernel{type=power(exponent)|const(value)|exp(rate)}, substeps",
     "int_0^t f(t-s) dW_s"},
    {"process", "wiener_param", "kernel{type=mvn(H)|indicator}, tail_cutoff, quad_steps",
     "int_0^inf f(t,s) dW_s"},
    {"process", "euler",
     "x0, drift{type=linear(a,b)|ou(theta,mu)|gbm(rate)}, vol{type=const(value)|affine_time(a,b)|proportional(value)}, "
     "drift_lipschitz",
     "Euler scheme of a Brownian diffusion"},
    {"process", "gbm", "s0, rate, vol", "Black-Scholes, exact on the nodes"},
    {"process", "pii",
     "drift{type=linear(rate)}, time_change{type=linear(rate)}, intensity, jump{law}, fixed_jumps[{time, law}]",
     "process with independent increments"},
    {"process", "exp_pii", "s0 + pii parameters", "s0 exp(X) for a PII X"},
    {"process", "gaussian_vector", "cov (matrix)", "Gaussian vector as a path (grid ignored)"},
    {"functional", "terminal", "", "non-decreasing"},
    {"functional", "running_max", "", "non-decreasing"},
    {"functional", "running_min", "", "non-decreasing"},
    {"functional", "integral",
     "measure{type=lebesgue|uniform_average|exp_weighted_average(rate)|dirac(time)|dirac_terminal}",
     "non-decreasing"},
    {"functional", "coordinate", "index", "non-decreasing"},
    {"functional", "call_payoff", "strike", "non-decreasing"},
    {"functional", "smoothed_down", "barrier, eps", "non-increasing"},
    {"functional", "smoothed_up", "barrier, eps", "non-decreasing"},
    {"functional", "down_indicator", "barrier", "non-increasing, continuity unverified"},
    {"functional", "up_indicator", "barrier", "non-decreasing, continuity unverified"},
    {"functional-map", "compose", "identity|negate|exp|tanh|cube|square", "applied to a functional's value"},
    {"convex", "call_part", "strike", "(x-K)_+"},
    {"convex", "abs_dev", "strike", "|x-K|"},
    {"convex", "square", "", "x^2"},
    {"convex", "soft_plus", "strike, eps", "eps log(1+e^{(x-K)/eps})"},
    {"convex", "linear", "", "x"},
    {"barrier", "DownIn", "strike, barrier_down", "(S_T-K)_+ 1{min S <= L}"},
    {"barrier", "DownOut", "strike, barrier_down", "(S_T-K)_+ 1{min S > L}"},
    {"barrier", "UpIn", "strike, barrier_up", "(S_T-K)_+ 1{max S > L}"},
    {"barrier", "UpOut", "strike, barrier_up", "(S_T-K)_+ 1{max S <= L}"},
    {"experiment", "simulate", "groups[{process, functionals, covariance_oracle}]", ""},
    {"experiment", "comonotony", "groups[{process, functionals, pairs}], running_extrema[{process, y, x}]", ""},
    {"experiment", "antithetic", "cases[{process, functional, bootstrap, expect}]", ""},
    {"experiment", "peacock",
     "curves[{type=exp_pii|centered_antiderivative|asian_vega|carr_maturity|vega_identity, ...}]", ""},
    {"experiment", "barrier", "process, strike, barrier_down, barrier_up, kinds, window, discount, ladder", ""},
    {"experiment", "pitt", "matrices[{entries|builtin=horn, expect_factor, sample_check}], tol, max_iter, restarts",
     ""},
};

// ---------------------------------------------------------------------------
// builders

TimeGrid parse_grid(const json& j, const std::string& ptr) {
  check_keys(j, {"T", "n_steps"}, ptr);
  return guarded(ptr, [&] { return TimeGrid(num(j, "T", ptr), as_size(req(j, "n_steps", ptr), at(ptr, "n_steps"))); });
}

TimeGrid grid_for(const json& block, const TimeGrid& fallback, const std::string& ptr) {
  return block.contains("grid") ? parse_grid(block.at("grid"), at(ptr, "grid")) : fallback;
}

JumpLaw parse_law(const json& j, const std::string& ptr) {
  const std::string law = as_string(req(j, "law", ptr), at(ptr, "law"));
  return guarded(ptr, [&] {
    if (law == "constant") {
      check_keys(j, {"law", "value"}, ptr);
      return JumpLaw::constant(num(j, "value", ptr));
    }
    if (law == "normal") {
      check_keys(j, {"law", "mean", "sd"}, ptr);
      return JumpLaw::normal(num(j, "mean", ptr), num(j, "sd", ptr));
    }
    if (law == "exponential") {
      check_keys(j, {"law", "rate"}, ptr);
      return JumpLaw::exponential(num(j, "rate", ptr));
    }
    if (law == "uniform") {
      check_keys(j, {"law", "lo", "hi"}, ptr);
      return JumpLaw::uniform(num(j, "lo", ptr), num(j, "hi", ptr));
    }
    throw ConfigError("unknown jump law '" + law + "' at " + at(ptr, "law"));
  });
}

RealFn parse_linear_fn(const json& j, double default_rate, const std::string& ptr) {
  check_keys(j, {"type", "rate"}, ptr);
  const std::string type = as_string(req(j, "type", ptr), at(ptr, "type"));
  if (type != "linear") throw ConfigError("unknown function type '" + type + "' at " + at(ptr, "type"));
  const double rate = num_or(j, "rate", default_rate, ptr);
  return [rate](double t) { return rate * t; };
}

const std::set<std::string> kPiiKeys = {"drift", "time_change", "intensity", "jump", "fixed_jumps"};

PIISpec parse_pii(const json& j, const std::string& ptr) {
  PIISpec spec;
  if (j.contains("drift")) spec.drift = parse_linear_fn(j.at("drift"), 0.0, at(ptr, "drift"));
  if (j.contains("time_change")) spec.time_change = parse_linear_fn(j.at("time_change"), 1.0, at(ptr, "time_change"));
  spec.intensity = num_or(j, "intensity", 0.0, ptr);
  if (j.contains("jump")) spec.jump = parse_law(j.at("jump"), at(ptr, "jump"));
  if (j.contains("fixed_jumps")) {
    const std::string fp = at(ptr, "fixed_jumps");
    const json& arr = as_array(j.at("fixed_jumps"), fp);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ip = at(fp, i);
      require_object(arr[i], ip);
      json law = arr[i];
      const double time = num(law, "time", ip);
      law.erase("time");
      spec.fixed_jumps.push_back({time, parse_law(law, ip)});
    }
  }
  return spec;
}

RealFn parse_kernel(const json& j, const std::string& ptr) {
  const std::string type = as_string(req(j, "type", ptr), at(ptr, "type"));
  if (type == "power") {
    check_keys(j, {"type", "exponent"}, ptr);
    const double a = num(j, "exponent", ptr);
    return [a](double u) { return std::pow(u, a); };
  }
  if (type == "const") {
    check_keys(j, {"type", "value"}, ptr);
    const double c = num(j, "value", ptr);
    return [c](double) { return c; };
  }
  if (type == "exp") {
    check_keys(j, {"type", "rate"}, ptr);
    const double r = num(j, "rate", ptr);
    return [r](double u) { return std::exp(-r * u); };
  }
  throw ConfigError("unknown kernel type '" + type + "' at " + at(ptr, "type"));
}

struct BuiltProcess {
  Process process;
  std::string kind;
  /// Closed-form or quadrature covariance of the node values, when available.
  std::function<double(double, double)> covariance;
  /// Extra tolerance on covariance checks (series truncation deficit).
  std::function<double(double, double)> covariance_slack;
  std::optional<double> s0;
  std::vector<std::string> warnings;
};

BuiltProcess build_process(const json& j, const TimeGrid& grid, const std::string& ptr) {
  const std::string name = as_string(req(j, "name", ptr), at(ptr, "name"));
  auto keys = [&](std::set<std::string> allowed) {
    allowed.insert("name");
    check_keys(j, allowed, ptr);
  };
  const double T = grid.horizon();
  return guarded(ptr, [&]() -> BuiltProcess {
    if (name == "brownian_motion") {
      keys({});
      return {make_bm(grid), name, [](double s, double t) { return std::min(s, t); }, {}, {}, {}};
    }
    if (name == "bm_series") {
      keys({"n_terms"});
      const std::size_t n = as_size(req(j, "n_terms", ptr), at(ptr, "n_terms"));
      return {make_bm_series(grid, n), name, [](double s, double t) { return std::min(s, t); },
              [T, n](double s, double t) { return std::abs(std::min(s, t) - bm_series_covariance(s, t, T, n)); },
              {}, {}};
    }
    if (name == "brownian_bridge") {
      keys({});
      return {make_bridge(grid), name, [T](double s, double t) { return bridge_covariance(s, t, T); }, {}, {}, {}};
    }
    if (name == "fbm") {
      keys({"H", "method", "tail_cutoff", "quad_steps"});
      const double h = num(j, "H", ptr);
      const std::string method = str_or(j, "method", "cholesky", ptr);
      auto cov = [h](double s, double t) { return fbm_covariance(s, t, h); };
      if (method == "cholesky") return {make_fbm_cholesky(grid, h), name, cov, {}, {}, {}};
      if (method == "mvn")
        return {make_fbm_mvn(grid, h, num_or(j, "tail_cutoff", 0.0, ptr), size_or(j, "quad_steps", 0, ptr)), name,
                cov, {}, {}, {}};
      throw ConfigError("unknown fbm method '" + method + "' at " + at(ptr, "method"));
    }
    if (name == "liouville") {
      keys({"kernel", "substeps"});
      RealFn kernel = parse_kernel(req(j, "kernel", ptr), at(ptr, "kernel"));
      BuiltProcess b{make_liouville(grid, kernel, size_or(j, "substeps", 1, ptr)), name,
                     [kernel](double s, double t) { return liouville_covariance(kernel, s, t); }, {}, {}, {}};
      if (!LiouvilleSampler(grid, kernel, size_or(j, "substeps", 1, ptr)).kernel_nonnegative())
        b.warnings.push_back("liouville kernel takes negative values; co-monotony is not guaranteed");
      return b;
    }
    if (name == "wiener_param") {
      keys({"kernel", "tail_cutoff", "quad_steps"});
      const std::string kp = at(ptr, "kernel");
      const json& k = req(j, "kernel", ptr);
      const std::string type = as_string(req(k, "type", kp), at(kp, "type"));
      const double cut = num_or(j, "tail_cutoff", 0.0, ptr);
      const std::size_t steps = size_or(j, "quad_steps", 0, ptr);
      if (type == "indicator") {
        check_keys(k, {"type"}, kp);
        return {make_wiener_param(grid, [](double t, double s) { return s < t ? 1.0 : 0.0; }, cut, steps), name,
                [](double s, double t) { return std::min(s, t); }, {}, {}, {}};
      }
      if (type == "mvn") {
        check_keys(k, {"type", "H"}, kp);
        const double h = num(k, "H", kp);
        const double a = h - 0.5;
        return {make_wiener_param(
                    grid, [a](double t, double s) { return std::pow(t + s, a) - std::pow(s, a); }, cut, steps),
                name, {}, {}, {}, {}};
      }
      throw ConfigError("unknown wiener_param kernel '" + type + "' at " + at(kp, "type"));
    }
    if (name == "euler") {
      keys({"x0", "drift", "vol", "drift_lipschitz"});
      DiffusionSpec spec;
      spec.x0 = num(j, "x0", ptr);
      const std::string dp = at(ptr, "drift");
      const json& d = req(j, "drift", ptr);
      const std::string dt = as_string(req(d, "type", dp), at(dp, "type"));
      if (dt == "linear") {
        check_keys(d, {"type", "a", "b"}, dp);
        const double a = num(d, "a", dp), b = num(d, "b", dp);
        spec.drift = [a, b](double, double x) { return a + b * x; };
        spec.drift_lipschitz = std::abs(b);
      } else if (dt == "ou") {
        check_keys(d, {"type", "theta", "mu"}, dp);
        const double th = num(d, "theta", dp), mu = num(d, "mu", dp);
        spec.drift = [th, mu](double, double x) { return th * (mu - x); };
        spec.drift_lipschitz = std::abs(th);
      } else if (dt == "gbm") {
        check_keys(d, {"type", "rate"}, dp);
        const double r = num(d, "rate", dp);
        spec.drift = [r](double, double x) { return r * x; };
        spec.drift_lipschitz = std::abs(r);
      } else {
        throw ConfigError("unknown drift type '" + dt + "' at " + at(dp, "type"));
      }
      const std::string vp = at(ptr, "vol");
      const json& v = req(j, "vol", ptr);
      const std::string vt = as_string(req(v, "type", vp), at(vp, "type"));
      if (vt == "const") {
        check_keys(v, {"type", "value"}, vp);
        const double c = num(v, "value", vp);
        if (!(c >= 0.0)) throw ConfigError("volatility must be >= 0 at " + at(vp, "value"));
        spec.vol = [c](double, double) { return c; };
      } else if (vt == "affine_time") {
        check_keys(v, {"type", "a", "b"}, vp);
        const double a = num(v, "a", vp), b = num(v, "b", vp);
        if (!(a >= 0.0 && a + b * T >= 0.0)) throw ConfigError("volatility must be >= 0 on [0, T] at " + vp);
        spec.vol = [a, b](double t, double) { return a + b * t; };
      } else if (vt == "proportional") {
        check_keys(v, {"type", "value"}, vp);
        const double c = num(v, "value", vp);
        if (!(c >= 0.0)) throw ConfigError("volatility must be >= 0 at " + at(vp, "value"));
        spec.vol = [c](double, double x) { return c * std::max(x, 0.0); };
      } else {
        throw ConfigError("unknown vol type '" + vt + "' at " + at(vp, "type"));
      }
      if (j.contains("drift_lipschitz")) spec.drift_lipschitz = num(j, "drift_lipschitz", ptr);
      BuiltProcess b{make_euler(spec, grid), name, {}, {}, spec.x0, {}};
      switch (euler_monotony_check(spec, grid)) {
        case MonotonyCheck::Violated:
          throw ConfigError("Euler step h = " + fmt(grid.step()) + " violates h < 1/Lip(b) at " + loc(ptr));
        case MonotonyCheck::Unchecked:
          b.warnings.push_back("euler: no drift Lipschitz bound, monotony of the scheme unchecked");
          break;
        case MonotonyCheck::Satisfied:
          break;
      }
      return b;
    }
    if (name == "gbm") {
      keys({"s0", "rate", "vol"});
      GBMSpec spec{num(j, "s0", ptr), num_or(j, "rate", 0.0, ptr), num(j, "vol", ptr)};
      return {make_gbm(spec, grid), name, {}, {}, spec.s0, {}};
    }
    if (name == "pii") {
      auto allowed = kPiiKeys;
      keys(allowed);
      return {make_pii(parse_pii(j, ptr), grid), name, {}, {}, 0.0, {}};
    }
    if (name == "exp_pii") {
      auto allowed = kPiiKeys;
      allowed.insert("s0");
      keys(allowed);
      const double s0 = num(j, "s0", ptr);
      return {make_exp_pii(parse_pii(j, ptr), s0, grid), name, {}, {}, s0, {}};
    }
    if (name == "gaussian_vector") {
      keys({"cov"});
      const std::string cp = at(ptr, "cov");
      const json& c = as_array(req(j, "cov", ptr), cp);
      const auto d = static_cast<Eigen::Index>(c.size());
      Eigen::MatrixXd m(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        const auto row = as_doubles(c[r], at(cp, static_cast<std::size_t>(r)));
        if (static_cast<Eigen::Index>(row.size()) != d) throw ConfigError("covariance matrix must be square at " + cp);
        for (Eigen::Index k = 0; k < d; ++k) m(r, k) = row[k];
      }
      const CovMatrix cov(m);
      return {make_gaussian_vector(cov), name, [m](double s, double t) {
                const auto n = m.rows() - 1;
                return m(static_cast<Eigen::Index>(std::lround(s * n)), static_cast<Eigen::Index>(std::lround(t * n)));
              },
              {}, {}, {}};
    }
    throw ConfigError("unknown process '" + name + "' at " + at(ptr, "name"));
  });
}

WeightMeasure parse_measure(const json& j, const TimeGrid& grid, const std::string& ptr) {
  const std::string type = as_string(req(j, "type", ptr), at(ptr, "type"));
  return guarded(ptr, [&] {
    if (type == "lebesgue") {
      check_keys(j, {"type"}, ptr);
      return WeightMeasure::lebesgue(grid);
    }
    if (type == "uniform_average") {
      check_keys(j, {"type"}, ptr);
      return WeightMeasure::uniform_average(grid);
    }
    if (type == "exp_weighted_average") {
      check_keys(j, {"type", "rate"}, ptr);
      return WeightMeasure::exp_weighted_average(grid, num(j, "rate", ptr));
    }
    if (type == "dirac") {
      check_keys(j, {"type", "time"}, ptr);
      return WeightMeasure::dirac(grid, num(j, "time", ptr));
    }
    if (type == "dirac_terminal") {
      check_keys(j, {"type"}, ptr);
      return WeightMeasure::dirac_terminal(grid);
    }
    throw ConfigError("unknown measure type '" + type + "' at " + at(ptr, "type"));
  });
}

ScalarMap parse_map(const std::string& name, const std::string& ptr) {
  if (name == "identity") return ScalarMap::identity();
  if (name == "negate") return ScalarMap::negation();
  if (name == "exp") return ScalarMap::exponential();
  if (name == "tanh") return ScalarMap::hyperbolic_tangent();
  if (name == "cube") return ScalarMap::cube();
  if (name == "square") return ScalarMap::square();
  throw ConfigError("unknown map '" + name + "' at " + ptr);
}

MonotoneFunctional build_functional(const json& j, const TimeGrid& grid, const std::string& ptr) {
  const std::string name = as_string(req(j, "name", ptr), at(ptr, "name"));
  auto keys = [&](std::set<std::string> allowed) {
    allowed.insert("name");
    allowed.insert("compose");
    check_keys(j, allowed, ptr);
  };
  MonotoneFunctional f = guarded(ptr, [&]() -> MonotoneFunctional {
    if (name == "terminal") return keys({}), terminal();
    if (name == "running_max") return keys({}), running_max();
    if (name == "running_min") return keys({}), running_min();
    if (name == "integral") {
      keys({"measure"});
      const WeightMeasure mu = j.contains("measure") ? parse_measure(j.at("measure"), grid, at(ptr, "measure"))
                                                     : WeightMeasure::uniform_average(grid);
      return integral(mu);
    }
    if (name == "coordinate") return keys({"index"}), coordinate(as_size(req(j, "index", ptr), at(ptr, "index")));
    if (name == "call_payoff") return keys({"strike"}), call_payoff(num(j, "strike", ptr));
    if (name == "smoothed_down")
      return keys({"barrier", "eps"}), smoothed_down_indicator(num(j, "barrier", ptr), num(j, "eps", ptr));
    if (name == "smoothed_up")
      return keys({"barrier", "eps"}), smoothed_up_indicator(num(j, "barrier", ptr), num(j, "eps", ptr));
    if (name == "down_indicator") return keys({"barrier"}), down_indicator(num(j, "barrier", ptr));
    if (name == "up_indicator") return keys({"barrier"}), up_indicator(num(j, "barrier", ptr));
    throw ConfigError("unknown functional '" + name + "' at " + at(ptr, "name"));
  });
  if (j.contains("compose")) f = compose(parse_map(as_string(j.at("compose"), at(ptr, "compose")), at(ptr, "compose")), f);
  return f;
}

std::vector<MonotoneFunctional> build_functionals(const json& arr, const TimeGrid& grid, const std::string& ptr) {
  as_array(arr, ptr);
  std::vector<MonotoneFunctional> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(build_functional(arr[i], grid, at(ptr, i)));
  if (out.empty()) throw ConfigError("empty functional list at " + ptr);
  return out;
}

ConvexTestFn build_convex(const json& j, const std::string& ptr) {
  const std::string name = as_string(req(j, "name", ptr), at(ptr, "name"));
  return guarded(ptr, [&] {
    if (name == "call_part") {
      check_keys(j, {"name", "strike"}, ptr);
      return ConvexTestFn::call_part(num(j, "strike", ptr));
    }
    if (name == "abs_dev") {
      check_keys(j, {"name", "strike"}, ptr);
      return ConvexTestFn::abs_dev(num(j, "strike", ptr));
    }
    if (name == "square") {
      check_keys(j, {"name"}, ptr);
      return ConvexTestFn::square();
    }
    if (name == "soft_plus") {
      check_keys(j, {"name", "strike", "eps"}, ptr);
      return ConvexTestFn::soft_plus(num(j, "strike", ptr), num(j, "eps", ptr));
    }
    if (name == "linear") {
      check_keys(j, {"name"}, ptr);
      return ConvexTestFn::linear();
    }
    throw ConfigError("unknown convex function '" + name + "' at " + at(ptr, "name"));
  });
}

// ---------------------------------------------------------------------------
// experiment kinds

struct Common {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t n_paths = 100000;
  double z = 4.0;
  unsigned workers = 0;
  TimeGrid grid{1.0, 256};
};

RunOptions options_for(const Common& c, const json& block, std::size_t index, const std::string& ptr) {
  RunOptions o;
  o.n_paths = size_or(block, "n_paths", c.n_paths, ptr);
  o.seed = derive_seed(c.seed, index);
  o.workers = c.workers;
  o.z = c.z;
  return o;
}

std::string label_for(const json& block, const std::string& fallback, const std::string& ptr) {
  return str_or(block, "label", fallback, ptr);
}

void add_warnings(ExperimentResult& out, const BuiltProcess& b) {
  for (const auto& w : b.warnings) out.warnings.push_back(b.kind + ": " + w);
}

const char* verdict_of(bool ok) { return ok ? "consistent" : "violation"; }

void run_simulate(const json& cfg, const Common& c, ExperimentResult& out) {
  const std::string gp = "/groups";
  const json& groups = as_array(req(cfg, "groups", ""), gp);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string ptr = at(gp, g);
    const json& blk = groups[g];
    check_keys(blk, {"process", "grid", "n_paths", "functionals", "covariance_oracle", "label"}, ptr);
    const TimeGrid grid = grid_for(blk, c.grid, ptr);
    const BuiltProcess bp = build_process(req(blk, "process", ptr), grid, at(ptr, "process"));
    add_warnings(out, bp);
    const Process& proc = bp.process;
    const TimeGrid& pg = proc.grid();
    const std::string label = label_for(blk, proc.name(), ptr);
    std::vector<MonotoneFunctional> fns;
    if (blk.contains("functionals")) fns = build_functionals(blk.at("functionals"), pg, at(ptr, "functionals"));
    const bool cov = blk.contains("covariance_oracle") && as_bool(blk.at("covariance_oracle"), at(ptr, "covariance_oracle"));
    if (cov && !bp.covariance) throw ConfigError("no covariance oracle for process '" + bp.kind + "' at " + ptr);
    if (cov && pg.n_steps() > 64) throw ConfigError("covariance_oracle supports at most 64 steps at " + ptr);
    const RunOptions o = options_for(c, blk, g, ptr);
    const std::size_t nodes = pg.size();
    const std::size_t cols = nodes + fns.size();
    const auto table = map_paths(o.n_paths, cols, o.seed, o.workers,
                                 [&](std::size_t i, RngStream& rng, std::span<double> row) {
                                   const Path p = proc.sample(rng);
                                   for (std::size_t k = 0; k < nodes; ++k) row[k] = p[k];
                                   for (std::size_t f = 0; f < fns.size(); ++f) {
                                     row[nodes + f] = fns[f](p);
                                     if (!std::isfinite(row[nodes + f]))
                                       throw SimulationError("functional '" + fns[f].description +
                                                             "' is not finite on path " + std::to_string(i));
                                   }
                                 });
    std::vector<std::vector<double>> node_cols(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
      node_cols[k] = column(table, cols, k);
      const auto est = MCEstimate::from_samples(node_cols[k]);
      out.curves.push_back({label + ":mean", pg.point(k), est.mean, est.std_error});
    }
    for (std::size_t f = 0; f < fns.size(); ++f) {
      const auto est = MCEstimate::from_samples(column(table, cols, nodes + f));
      out.rows.push_back({label + ":" + fns[f].description, est.mean, est.std_error, est.n_samples,
                          to_string(fns[f].monotonicity), ""});
    }
    if (!cov) continue;
    for (std::size_t a = 1; a < nodes; ++a)
      for (std::size_t b = a; b < nodes; ++b) {
        const CovTestReport r = cov_test(node_cols[a], node_cols[b], PredictedSign::None, o.z);
        const double s = pg.point(a), t = pg.point(b);
        const double oracle = bp.covariance(s, t);
        const double slack = bp.covariance_slack ? bp.covariance_slack(s, t) : 0.0;
        const bool ok = std::abs(r.cov_estimate - oracle) <= o.z * r.std_error + slack;
        out.rows.push_back({label + ":cov[" + std::to_string(a) + "," + std::to_string(b) + "]", r.cov_estimate,
                            r.std_error, r.n_paths, "oracle=" + fmt(oracle), verdict_of(ok)});
      }
  }
}

void push_cov_reports(ExperimentResult& out, const std::string& label, const std::vector<CovTestReport>& reports,
                      const std::string& process_name) {
  for (const auto& r : reports) {
    std::string name = r.name;
    if (name.rfind(process_name + ":", 0) == 0) name = label + name.substr(process_name.size());
    out.rows.push_back({name, r.cov_estimate, r.std_error, r.n_paths, to_string(r.predicted), to_string(r.verdict)});
  }
}

void run_comonotony(const json& cfg, const Common& c, ExperimentResult& out) {
  std::size_t index = 0;
  if (cfg.contains("groups")) {
    const std::string gp = "/groups";
    const json& groups = as_array(cfg.at("groups"), gp);
    for (std::size_t g = 0; g < groups.size(); ++g, ++index) {
      const std::string ptr = at(gp, g);
      const json& blk = groups[g];
      check_keys(blk, {"process", "grid", "n_paths", "functionals", "pairs", "label"}, ptr);
      const TimeGrid grid = grid_for(blk, c.grid, ptr);
      const BuiltProcess bp = build_process(req(blk, "process", ptr), grid, at(ptr, "process"));
      add_warnings(out, bp);
      const auto fns = build_functionals(req(blk, "functionals", ptr), bp.process.grid(), at(ptr, "functionals"));
      for (const auto& f : fns)
        if (!f.continuity_verified)
          out.warnings.push_back(f.description + ": continuity of the functional is not verified");
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      if (blk.contains("pairs")) {
        const std::string pp = at(ptr, "pairs");
        const json& arr = as_array(blk.at("pairs"), pp);
        for (std::size_t i = 0; i < arr.size(); ++i) {
          const json& pr = as_array(arr[i], at(pp, i));
          if (pr.size() != 2) throw ConfigError("a pair needs two indices at " + at(pp, i));
          pairs.emplace_back(as_size(pr[0], at(at(pp, i), 0)), as_size(pr[1], at(at(pp, i), 1)));
        }
      }
      const RunOptions o = options_for(c, blk, index, ptr);
      const auto reports = guarded(ptr, [&] { return cov_sweep(bp.process, fns, o, pairs); });
      push_cov_reports(out, label_for(blk, bp.process.name(), ptr), reports, bp.process.name());
    }
  }
  if (cfg.contains("running_extrema")) {
    const std::string rp = "/running_extrema";
    const json& arr = as_array(cfg.at("running_extrema"), rp);
    for (std::size_t g = 0; g < arr.size(); ++g, ++index) {
      const std::string ptr = at(rp, g);
      const json& blk = arr[g];
      check_keys(blk, {"process", "grid", "n_paths", "y", "x", "label"}, ptr);
      const TimeGrid grid = grid_for(blk, c.grid, ptr);
      const BuiltProcess bp = build_process(req(blk, "process", ptr), grid, at(ptr, "process"));
      add_warnings(out, bp);
      const double y = num(blk, "y", ptr);
      const auto xs = as_doubles(req(blk, "x", ptr), at(ptr, "x"));
      const RunOptions o = options_for(c, blk, index, ptr);
      const auto r = guarded(ptr, [&] { return running_extrema_conditional(bp.process, y, xs, o); });
      const std::string label = label_for(blk, bp.process.name(), ptr);
      out.rows.push_back({label + ":P(sup>=" + fmt(y) + ")", r.unconditional.mean, r.unconditional.std_error,
                          r.unconditional.n_samples, "", ""});
      for (const auto& cnd : r.conditional) {
        std::string verdict = "inconclusive";
        if (!cnd.inconclusive) {
          const double pooled = std::hypot(cnd.std_error, r.unconditional.std_error);
          verdict = verdict_of(cnd.probability >= r.unconditional.mean - o.z * pooled);
        }
        out.rows.push_back({label + ":P(sup>=" + fmt(y) + "|X_T>=" + fmt(cnd.x) + ")", cnd.probability,
                            cnd.std_error, cnd.n_conditioning, ">=unconditional", verdict});
        if (!cnd.inconclusive) out.curves.push_back({label + ":conditional", cnd.x, cnd.probability, cnd.std_error});
      }
    }
  }
  if (index == 0) throw ConfigError("comonotony config needs 'groups' or 'running_extrema' at /");
}

void run_antithetic(const json& cfg, const Common& c, ExperimentResult& out) {
  const std::string cp = "/cases";
  const json& cases = as_array(req(cfg, "cases", ""), cp);
  for (std::size_t g = 0; g < cases.size(); ++g) {
    const std::string ptr = at(cp, g);
    const json& blk = cases[g];
    check_keys(blk, {"process", "grid", "n_paths", "functional", "bootstrap", "expect", "label"}, ptr);
    const TimeGrid grid = grid_for(blk, c.grid, ptr);
    const BuiltProcess bp = build_process(req(blk, "process", ptr), grid, at(ptr, "process"));
    add_warnings(out, bp);
    const MonotoneFunctional f = build_functional(req(blk, "functional", ptr), bp.process.grid(), at(ptr, "functional"));
    const RunOptions o = options_for(c, blk, g, ptr);
    const std::size_t boot = size_or(blk, "bootstrap", 1000, ptr);
    const auto r = guarded(ptr, [&] { return antithetic_estimate(bp.process, f, o, boot, 0.99); });
    const std::string label = label_for(blk, bp.process.name() + ":" + f.description, ptr);

    std::string anti_pred, anti_verdict, ratio_pred, ratio_verdict;
    if (blk.contains("expect")) {
      const std::string ep = at(ptr, "expect");
      const json& e = blk.at("expect");
      check_keys(e, {"ratio_ci_below", "antithetic_variance", "ratio_within"}, ep);
      if (e.contains("antithetic_variance")) {
        const double v = num(e, "antithetic_variance", ep);
        anti_pred = "variance=" + fmt(v);
        anti_verdict = verdict_of(r.antithetic.variance == v);
      }
      if (e.contains("ratio_ci_below")) {
        const double v = num(e, "ratio_ci_below", ep);
        ratio_pred = "ci99<" + fmt(v);
        ratio_verdict = verdict_of(r.ratio_ci_high < v);
      }
      if (e.contains("ratio_within")) {
        const auto v = as_doubles(e.at("ratio_within"), at(ep, "ratio_within"));
        if (v.size() != 2) throw ConfigError("ratio_within needs [low, high] at " + at(ep, "ratio_within"));
        ratio_pred = "in[" + fmt(v[0]) + "," + fmt(v[1]) + "]";
        ratio_verdict = verdict_of(r.variance_ratio >= v[0] && r.variance_ratio <= v[1]);
      }
    }
    out.rows.push_back({label + ":plain", r.plain.mean, r.plain.std_error, r.plain.n_samples, "", ""});
    out.rows.push_back({label + ":antithetic", r.antithetic.mean, r.antithetic.std_error, r.antithetic.n_samples,
                        anti_pred, anti_verdict});
    out.rows.push_back({label + ":variance_ratio", r.variance_ratio, 0.0, r.plain.n_samples, ratio_pred, ratio_verdict});
    out.rows.push_back({label + ":ratio_ci_low", r.ratio_ci_low, 0.0, boot, "", ""});
    out.rows.push_back({label + ":ratio_ci_high", r.ratio_ci_high, 0.0, boot, "", ""});
    const double pooled = std::hypot(r.plain.std_error, r.antithetic.std_error);
    const double diff = r.plain.mean - r.antithetic.mean;
    out.rows.push_back({label + ":mean_difference", diff, pooled, r.plain.n_samples, "=0",
                        verdict_of(std::abs(diff) <= o.z * pooled)});
  }
}

void push_curve(ExperimentResult& out, const std::string& label, const PeacockCurve& curve, const json& blk,
                const std::string& ptr, double z) {
  for (std::size_t k = 0; k < curve.points.size(); ++k)
    out.curves.push_back({label, curve.parameters[k], curve.points[k].mean, curve.points[k].std_error});
  const bool monotone = !blk.contains("monotone") || as_bool(blk.at("monotone"), at(ptr, "monotone"));
  for (std::size_t k = 0; k < curve.differences.size(); ++k) {
    const auto& d = curve.differences[k];
    out.rows.push_back({label + ":diff[" + std::to_string(k) + "]", d.mean, d.std_error, d.n_samples, ">=0",
                        monotone ? verdict_of(d.mean >= -z * d.std_error) : ""});
  }
  if (blk.contains("flat")) {
    const double v = num(blk, "flat", ptr);
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
      const auto& p = curve.points[k];
      out.rows.push_back({label + ":flat[" + std::to_string(k) + "]", p.mean, p.std_error, p.n_samples,
                          "=" + fmt(v), verdict_of(std::abs(p.mean - v) <= z * p.std_error + 1e-12 * std::max(1.0, std::abs(v)))});
    }
  }
  if (blk.contains("anchors")) {
    const std::string ap = at(ptr, "anchors");
    const json& arr = as_array(blk.at("anchors"), ap);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ip = at(ap, i);
      check_keys(arr[i], {"index", "value", "tol"}, ip);
      const std::size_t k = as_size(req(arr[i], "index", ip), at(ip, "index"));
      if (k >= curve.points.size()) throw ConfigError("anchor index out of range at " + at(ip, "index"));
      const double v = num(arr[i], "value", ip);
      const double tol = num_or(arr[i], "tol", 0.0, ip);
      const auto& p = curve.points[k];
      out.rows.push_back({label + ":anchor[" + std::to_string(k) + "]", p.mean, p.std_error, p.n_samples,
                          "=" + fmt(v) + "+-" + fmt(tol), verdict_of(std::abs(p.mean - v) <= tol)});
    }
  }
  if (curve.notes.find("pre-pass") != std::string::npos) out.warnings.push_back(label + ": " + curve.notes);
}

void run_peacock(const json& cfg, const Common& c, ExperimentResult& out) {
  const std::string cp = "/curves";
  const json& curves = as_array(req(cfg, "curves", ""), cp);
  for (std::size_t g = 0; g < curves.size(); ++g) {
    const std::string ptr = at(cp, g);
    const json& blk = curves[g];
    const std::string type = as_string(req(blk, "type", ptr), at(ptr, "type"));
    const std::set<std::string> common = {"type", "label", "grid", "n_paths", "phi", "monotone", "flat", "anchors"};
    auto keys = [&](std::set<std::string> extra) {
      extra.insert(common.begin(), common.end());
      check_keys(blk, extra, ptr);
    };
    const TimeGrid grid = grid_for(blk, c.grid, ptr);
    const RunOptions o = options_for(c, blk, g, ptr);
    const ConvexTestFn phi = build_convex(req(blk, "phi", ptr), at(ptr, "phi"));
    if (type == "exp_pii") {
      keys({"pii", "measure", "sigma"});
      const std::string pp = at(ptr, "pii");
      check_keys(req(blk, "pii", ptr), kPiiKeys, pp);
      const PIISpec spec = parse_pii(blk.at("pii"), pp);
      const WeightMeasure mu = blk.contains("measure") ? parse_measure(blk.at("measure"), grid, at(ptr, "measure"))
                                                       : WeightMeasure::uniform_average(grid);
      const auto sig = as_doubles(req(blk, "sigma", ptr), at(ptr, "sigma"));
      const auto curve = guarded(ptr, [&] { return exp_pii_peacock(spec, mu, phi, sig, o); });
      push_curve(out, label_for(blk, curve.name, ptr), curve, blk, ptr, c.z);
    } else if (type == "centered_antiderivative") {
      keys({"process", "measure", "t"});
      const BuiltProcess bp = build_process(req(blk, "process", ptr), grid, at(ptr, "process"));
      add_warnings(out, bp);
      const TimeGrid& pg = bp.process.grid();
      const WeightMeasure mu = blk.contains("measure") ? parse_measure(blk.at("measure"), pg, at(ptr, "measure"))
                                                       : WeightMeasure::lebesgue(pg);
      const auto ts = as_doubles(req(blk, "t", ptr), at(ptr, "t"));
      const auto curve = guarded(ptr, [&] { return centered_antiderivative_peacock(bp.process, mu, phi, ts, o); });
      push_curve(out, label_for(blk, curve.name, ptr), curve, blk, ptr, c.z);
    } else if (type == "asian_vega") {
      keys({"gbm", "sigma"});
      const std::string gp = at(ptr, "gbm");
      const json& gb = req(blk, "gbm", ptr);
      check_keys(gb, {"s0", "rate"}, gp);
      GBMSpec base{num(gb, "s0", gp), num_or(gb, "rate", 0.0, gp), 1.0};
      const auto sig = as_doubles(req(blk, "sigma", ptr), at(ptr, "sigma"));
      const auto curve = guarded(ptr, [&] { return asian_vega_curve(base, grid, sig, phi, o); });
      push_curve(out, label_for(blk, curve.name, ptr), curve, blk, ptr, c.z);
    } else if (type == "carr_maturity") {
      keys({"t"});
      const auto ts = as_doubles(req(blk, "t", ptr), at(ptr, "t"));
      const auto curve = guarded(ptr, [&] { return carr_maturity_curve(grid, ts, phi, o); });
      push_curve(out, label_for(blk, curve.name, ptr), curve, blk, ptr, c.z);
    } else if (type == "vega_identity") {
      check_keys(blk, {"type", "label", "n_paths", "phi", "sigma", "oracle", "rel_tol"}, ptr);
      const double sigma = num(blk, "sigma", ptr);
      const auto r = guarded(ptr, [&] { return scalar_vega_identity(phi, sigma, o); });
      const std::string label = label_for(blk, "vega_identity:" + phi.name() + ":sigma=" + fmt(sigma), ptr);
      const auto& fd = r.finite_difference;
      const auto& cm = r.cameron_martin;
      out.rows.push_back({label + ":finite_difference", fd.mean, fd.std_error, fd.n_samples, ">=0",
                          verdict_of(fd.mean >= -c.z * fd.std_error)});
      out.rows.push_back({label + ":cameron_martin", cm.mean, cm.std_error, cm.n_samples, ">=0",
                          verdict_of(cm.mean >= -c.z * cm.std_error)});
      out.rows.push_back({label + ":agreement", fd.mean - cm.mean, r.pooled_std_error, fd.n_samples, "=0",
                          verdict_of(r.agree(c.z))});
      if (blk.contains("oracle")) {
        const std::string oracle = as_string(blk.at("oracle"), at(ptr, "oracle"));
        double value = 0.0;
        if (oracle == "black_scholes") {
          if (phi.kind() != ConvexTestFn::Kind::CallPart)
            throw ConfigError("black_scholes oracle needs phi = call_part at " + at(ptr, "oracle"));
          value = guarded(ptr, [&] { return black_scholes_vega(phi.strike(), sigma); });
        } else if (oracle == "square_mgf") {
          if (phi.kind() != ConvexTestFn::Kind::Square)
            throw ConfigError("square_mgf oracle needs phi = square at " + at(ptr, "oracle"));
          value = 2.0 * sigma * std::exp(sigma * sigma);
        } else {
          throw ConfigError("unknown oracle '" + oracle + "' at " + at(ptr, "oracle"));
        }
        const bool rel = blk.contains("rel_tol");
        const double rel_tol = num_or(blk, "rel_tol", 0.0, ptr);
        for (const auto& [tag, est] : {std::pair{"fd", fd}, std::pair{"cm", cm}}) {
          const bool ok = rel ? std::abs(est.mean - value) <= rel_tol * std::abs(value)
                              : std::abs(est.mean - value) <= c.z * est.std_error;
          out.rows.push_back({label + ":oracle_" + tag, est.mean, est.std_error, est.n_samples,
                              "=" + fmt(value) + (rel ? " rel " + fmt(rel_tol) : ""), verdict_of(ok)});
        }
      }
      out.curves.push_back({label + ":finite_difference", sigma, fd.mean, fd.std_error});
      out.curves.push_back({label + ":cameron_martin", sigma, cm.mean, cm.std_error});
    } else {
      throw ConfigError("unknown peacock curve type '" + type + "' at " + at(ptr, "type"));
    }
  }
}

void run_barrier(const json& cfg, const Common& c, ExperimentResult& out) {
  const BuiltProcess bp = build_process(req(cfg, "process", ""), grid_for(cfg, c.grid, ""), "/process");
  add_warnings(out, bp);
  const Process& proc = bp.process;
  const double strike = num(cfg, "strike", "");
  std::vector<BarrierKind> kinds = {BarrierKind::DownIn, BarrierKind::DownOut, BarrierKind::UpIn, BarrierKind::UpOut};
  if (cfg.contains("kinds")) {
    kinds.clear();
    const json& arr = as_array(cfg.at("kinds"), "/kinds");
    for (std::size_t i = 0; i < arr.size(); ++i)
      kinds.push_back(guarded(at("/kinds", i), [&] { return barrier_kind_from_string(as_string(arr[i], at("/kinds", i))); }));
  }
  BarrierSpec base;
  base.strike = strike;
  base.discount = num_or(cfg, "discount", 1.0, "");
  if (cfg.contains("window")) {
    const auto w = as_doubles(cfg.at("window"), "/window");
    if (w.size() != 2) throw ConfigError("window needs [start, end] at /window");
    base.window = std::pair{w[0], w[1]};
  }
  const bool check_spot = !cfg.contains("check_spot") || as_bool(cfg.at("check_spot"), "/check_spot");
  auto spec_for = [&](BarrierKind k, const std::string& ptr) {
    BarrierSpec s = base;
    s.kind = k;
    const bool down = k == BarrierKind::DownIn || k == BarrierKind::DownOut;
    const std::string key = down ? "barrier_down" : "barrier_up";
    s.barrier = num(cfg, key, "");
    guarded(ptr, [&] {
      s.validate(proc.grid());
      if (check_spot && bp.s0) s.validate_against_spot(*bp.s0);
      return 0;
    });
    return s;
  };
  // every kind and the ladder use the same paths
  RunOptions o;
  o.n_paths = c.n_paths;
  o.seed = derive_seed(c.seed, 0);
  o.workers = c.workers;
  o.z = c.z;
  double parity = 0.0;
  std::size_t n = 0;
  std::size_t negative = 0;
  for (BarrierKind k : kinds) {
    const BarrierSpec spec = spec_for(k, "/kinds");
    const BoundReport r = verify_bounds(proc, spec, o);
    const std::string kn = to_string(k);
    out.rows.push_back({r.sharp.name, r.sharp.slack, r.sharp.std_error, r.barrier.n_samples,
                        std::string("price") + to_string(r.side) + "call*prob", to_string(r.sharp.verdict)});
    const double L = spec.barrier;
    out.curves.push_back({kn + ":price", L, r.barrier.mean, r.barrier.std_error});
    out.curves.push_back({kn + ":vanilla", L, r.vanilla.mean, r.vanilla.std_error});
    out.curves.push_back({kn + ":event_probability", L, r.crossing.mean, r.crossing.std_error});
    out.curves.push_back({kn + ":bound_rhs", L, r.sharp.rhs, 0.0});
    out.curves.push_back({kn + ":smoothed_slack", 0.0, r.sharp.slack, r.sharp.std_error});
    const double eps[] = {1e-2, 1e-4};
    for (std::size_t e = 0; e < r.smoothed.size(); ++e)
      out.curves.push_back({kn + ":smoothed_slack", eps[e], r.smoothed[e].slack, r.smoothed[e].std_error});
    parity = std::max(parity, r.parity_residual);
    n = r.barrier.n_samples;
    negative = std::max(negative, r.negative_paths);
  }
  out.rows.push_back({"parity", parity, 0.0, n, "<=1e-12", verdict_of(parity <= 1e-12)});
  if (negative > 0)
    out.warnings.push_back(std::to_string(negative) + " paths take negative values; the financial reading is questionable");
  if (cfg.contains("ladder")) {
    const std::string lp = "/ladder";
    const json& ld = cfg.at("ladder");
    check_keys(ld, {"kind", "barriers"}, lp);
    BarrierSpec s = base;
    s.kind = guarded(lp, [&] { return barrier_kind_from_string(str_or(ld, "kind", "DownIn", lp)); });
    const auto levels = as_doubles(req(ld, "barriers", lp), at(lp, "barriers"));
    const auto r = guarded(lp, [&] { return barrier_ladder(proc, s, levels, o); });
    const std::string kn = to_string(s.kind);
    for (std::size_t j = 0; j < r.barriers.size(); ++j)
      out.curves.push_back({"ladder:" + kn, r.barriers[j], r.prices[j].mean, r.prices[j].std_error});
    out.rows.push_back({"ladder:" + kn, r.pathwise_monotone ? 1.0 : 0.0, 0.0, o.n_paths, "pathwise monotone in L",
                        verdict_of(r.pathwise_monotone)});
  }
}

void run_pitt(const json& cfg, const Common& c, ExperimentResult& out) {
  const std::string mp = "/matrices";
  const json& mats = as_array(req(cfg, "matrices", ""), mp);
  NonnegFactorizationOptions nf;
  nf.tol = num_or(cfg, "tol", 1e-8, "");
  nf.max_iter = size_or(cfg, "max_iter", 20000, "");
  nf.restarts = size_or(cfg, "restarts", 20, "");
  for (std::size_t g = 0; g < mats.size(); ++g) {
    const std::string ptr = at(mp, g);
    const json& blk = mats[g];
    check_keys(blk,
               {"label", "entries", "builtin", "expect_factor", "rank_min", "rank_max", "tol", "sample_check", "n_paths"},
               ptr);
    const CovMatrix cov = guarded(ptr, [&]() -> CovMatrix {
      if (blk.contains("builtin")) {
        const std::string b = as_string(blk.at("builtin"), at(ptr, "builtin"));
        if (b != "horn") throw ConfigError("unknown builtin matrix '" + b + "' at " + at(ptr, "builtin"));
        return horn_matrix();
      }
      const std::string ep = at(ptr, "entries");
      const json& e = as_array(req(blk, "entries", ptr), ep);
      const auto d = static_cast<Eigen::Index>(e.size());
      Eigen::MatrixXd m(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        const auto row = as_doubles(e[r], at(ep, static_cast<std::size_t>(r)));
        if (static_cast<Eigen::Index>(row.size()) != d) throw ConfigError("matrix must be square at " + ep);
        for (Eigen::Index k = 0; k < d; ++k) m(r, k) = row[k];
      }
      return CovMatrix(m);
    });
    const std::string label = label_for(blk, "matrix" + std::to_string(g), ptr);
    const bool pitt = pitt_check(cov);
    out.rows.push_back({label + ":pitt_check", pitt ? 1.0 : 0.0, 0.0, 0, "", ""});
    const Eigen::VectorXd sv = cov.singular_values();
    const double ratio = sv.minCoeff() / sv.maxCoeff();
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-10 * sv.maxCoeff()) ++rank;
    out.rows.push_back({label + ":numerical_rank", static_cast<double>(rank), 0.0, 0, "", ""});
    out.rows.push_back({label + ":sv_ratio", ratio, 0.0, 0, "", ""});

    const auto d = static_cast<std::size_t>(cov.dim());
    const std::size_t rmin = size_or(blk, "rank_min", d, ptr);
    const std::size_t rmax = size_or(blk, "rank_max", 2 * d, ptr);
    if (rmin == 0 || rmin > rmax) throw ConfigError("need 1 <= rank_min <= rank_max at " + ptr);
    NonnegFactorization best;
    best.residual = std::numeric_limits<double>::infinity();
    for (std::size_t r = rmin; r <= rmax; ++r) {
      NonnegFactorizationOptions o = nf;
      o.tol = num_or(blk, "tol", nf.tol, ptr);
      o.seed = derive_seed(c.seed, g * 1000 + r);
      auto attempt = nonneg_factorization(cov, r, o);
      out.curves.push_back({label + ":best_residual_by_rank", static_cast<double>(r), attempt.residual, 0.0});
      if (attempt.residual < best.residual || attempt.found) best = attempt;
      if (attempt.found) break;
    }
    std::string pred, verdict = "inconclusive";
    if (blk.contains("expect_factor")) {
      const bool expect = as_bool(blk.at("expect_factor"), at(ptr, "expect_factor"));
      pred = expect ? "witness" : "no witness";
      verdict = verdict_of(best.found == expect);
    }
    out.rows.push_back({label + ":nonneg_factorization[" + (best.found ? "witness found" : "no witness found") + "]",
                        best.residual, 0.0, best.rank, pred, verdict});
    if (best.found) {
      const Eigen::MatrixXd re = best.factor * best.factor.transpose();
      const bool ok = (re.array() >= 0.0).all() && (best.factor.array() >= 0.0).all();
      out.rows.push_back({label + ":witness_nonnegative", ok ? 1.0 : 0.0, 0.0, best.rank, "=1", verdict_of(ok)});
    }

    if (blk.contains("sample_check") && as_bool(blk.at("sample_check"), at(ptr, "sample_check"))) {
      if (d < 2) throw ConfigError("sample_check needs dimension >= 2 at " + ptr);
      const Process proc = make_gaussian_vector(cov);
      const ScalarMap maps[] = {ScalarMap::identity(), ScalarMap::hyperbolic_tangent(), ScalarMap::cube()};
      std::vector<MonotoneFunctional> fns;
      for (std::size_t i = 0; i < d; ++i)
        for (const auto& m : maps) fns.push_back(compose(m, coordinate(i)));
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
          for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) pairs.emplace_back(3 * i + a, 3 * j + b);
      RunOptions o = options_for(c, blk, 100000 + g, ptr);
      const auto reports = cov_sweep(proc, fns, o, pairs);
      push_cov_reports(out, label, reports, proc.name());
    }
  }
}

const std::set<std::string> kCommonKeys = {"name", "kind", "seed", "n_paths", "z", "grid", "output", "description"};

const std::set<std::string>& kind_keys(const std::string& kind) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"simulate", {"groups"}},
      {"comonotony", {"groups", "running_extrema"}},
      {"antithetic", {"cases"}},
      {"peacock", {"curves"}},
      {"barrier", {"process", "strike", "barrier_down", "barrier_up", "kinds", "window", "discount", "ladder",
                   "check_spot"}},
      {"pitt", {"matrices", "tol", "max_iter", "restarts"}},
  };
  const auto it = keys.find(kind);
  if (it == keys.end()) throw ConfigError("unknown experiment kind '" + kind + "' at /kind");
  return it->second;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

ExperimentResult run_experiment(const std::string& json_text, const RunOverrides& overrides,
                                const std::string& default_name) {
  const json cfg = parse_json(json_text);
  require_object(cfg, "");
  const std::string kind = as_string(req(cfg, "kind", ""), "/kind");
  std::set<std::string> allowed = kCommonKeys;
  const auto& extra = kind_keys(kind);
  allowed.insert(extra.begin(), extra.end());
  check_keys(cfg, allowed, "");

  Common c;
  c.name = str_or(cfg, "name", default_name, "");
  if (overrides.seed)
    c.seed = *overrides.seed;
  else if (cfg.contains("seed"))
    c.seed = as_size(cfg.at("seed"), "/seed");
  else
    throw ConfigError("missing required key 'seed' at /");
  c.n_paths = overrides.paths ? *overrides.paths : size_or(cfg, "n_paths", 100000, "");
  c.z = num_or(cfg, "z", 4.0, "");
  if (!(c.z > 0.0)) throw ConfigError("z must be > 0 at /z");
  c.workers = overrides.workers;
  if (cfg.contains("grid")) c.grid = parse_grid(cfg.at("grid"), "/grid");

  ExperimentResult out;
  out.name = c.name;
  out.kind = kind;
  if (kind == "simulate") run_simulate(cfg, c, out);
  else if (kind == "comonotony") run_comonotony(cfg, c, out);
  else if (kind == "antithetic") run_antithetic(cfg, c, out);
  else if (kind == "peacock") run_peacock(cfg, c, out);
  else if (kind == "barrier") run_barrier(cfg, c, out);
  else run_pitt(cfg, c, out);
  return out;
}

std::optional<std::string> config_output_dir(const std::string& json_text) {
  const json cfg = parse_json(json_text);
  if (cfg.is_object() && cfg.contains("output")) return as_string(cfg.at("output"), "/output");
  return std::nullopt;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::string format_row(const ReportRow& r) {
  return csv_field(r.name) + "," + fmt(r.mean) + "," + fmt(r.std_error) + "," + std::to_string(r.n) + "," +
         csv_field(r.predicted) + "," + r.verdict;
}

std::string report_csv(const ExperimentResult& result) {
  std::string s = "name,mean,stderr,n,predicted,verdict\n";
  for (const auto& r : result.rows) s += format_row(r) + "\n";
  return s;
}

std::string curves_csv(const ExperimentResult& result) {
  std::string s = "curve,parameter,value,stderr\n";
  for (const auto& c : result.curves)
    s += csv_field(c.curve) + "," + fmt(c.parameter) + "," + fmt(c.value) + "," + fmt(c.std_error) + "\n";
  return s;
}

void write_outputs(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
  };
  write(fs::path(dir) / (result.name + "_report.csv"), report_csv(result));
  write(fs::path(dir) / (result.name + "_curves.csv"), curves_csv(result));
}

std::string list_registry() {
  std::ostringstream s;
  std::string last;
  for (const auto& e : kRegistry) {
    if (last != e.category) {
      s << (last.empty() ? "" : "\n") << e.category << ":\n";
      last = e.category;
    }
    s << "  " << e.name;
    if (*e.params) s << " (" << e.params << ")";
    if (*e.note) s << " - " << e.note;
    s << "\n";
  }
  return s.str();
}

}  // namespace comonotone
