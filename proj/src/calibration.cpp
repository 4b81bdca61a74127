#include "stacc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "stacc/csv.hpp"
#include "stacc/network.hpp"

namespace stacc {

const char* to_string(DecayFamily f)
{
  switch (f) {
    case DecayFamily::power: return "power";
    case DecayFamily::exponential: return "exponential";
    case DecayFamily::gaussian: return "gaussian";
  }
  return "?";
}

DecayFamily parse_decay_family(const std::string& text)
{
  if (text == "power") return DecayFamily::power;
  if (text == "exponential") return DecayFamily::exponential;
  if (text == "gaussian") return DecayFamily::gaussian;
  throw std::invalid_argument("unknown decay family '" + text + "'");
}

double decay(const DecaySpec& spec, double impedance)
{
  if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) throw std::invalid_argument("decay beta must be positive");
  if (is_unreachable(impedance)) return 0.0;
  const double d = std::max(impedance, spec.floor);
  switch (spec.family) {
    case DecayFamily::power: return std::pow(d, -spec.beta);
    case DecayFamily::exponential: return std::exp(-spec.beta * d);
    case DecayFamily::gaussian: return std::exp(-d * d / spec.beta);
  }
  return 0.0;
}

FrictionFit fit_friction(const std::vector<FlowObservation>& flows, double distance_floor)
{
  FrictionFit fit;
  std::vector<double> xs, ys;
  xs.reserve(flows.size());
  ys.reserve(flows.size());
  for (const FlowObservation& f : flows) {
    const bool usable = f.commuters > 0.0 && f.workers > 0.0 && f.jobs > 0.0 && !is_unreachable(f.distance) &&
                        f.distance > distance_floor && std::isfinite(f.distance);
    if (!usable) {
      ++fit.n_excluded;
      continue;
    }
    xs.push_back(std::log(f.distance));
    ys.push_back(std::log(f.commuters) - std::log(f.workers) - std::log(f.jobs));
  }
  fit.n_used = xs.size();
  if (fit.n_used < 3) {
    throw std::invalid_argument("friction fit needs at least 3 usable flow records, got " +
                                std::to_string(fit.n_used));
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 1e-12 * n)) throw std::invalid_argument("friction fit: distances have zero variance");

  const double slope = sxy / sxx;
  fit.beta = -slope;
  fit.intercept = my - slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::vector<FlowRecord> read_flows(const std::filesystem::path& path)
{
  const csv::Table t = csv::read(path);
  const auto c_o = t.column("origin_id");
  const auto c_d = t.column("destination_id");
  const auto c_n = t.column("commuters");
  std::vector<FlowRecord> out;
  out.reserve(t.rows.size());
  for (const csv::Row& row : t.rows) {
    const double n = t.number(row, c_n);
    if (n < 0.0) throw std::runtime_error(path.string() + ":" + std::to_string(row.line) + ": negative commuters");
    out.push_back({t.field(row, c_o), t.field(row, c_d), n});
  }
  return out;
}

std::string to_json(const FrictionFit& fit)
{
  nlohmann::ordered_json j;
  j["beta"] = fit.beta;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["n_used"] = fit.n_used;
  j["n_excluded"] = fit.n_excluded;
  return j.dump(2);
}

FrictionFit friction_fit_from_json(const std::string& text)
{
  const auto j = nlohmann::json::parse(text);
  FrictionFit fit;
  fit.beta = j.at("beta").get<double>();
  fit.intercept = j.value("intercept", 0.0);
  fit.r_squared = j.value("r_squared", 0.0);
  fit.n_used = j.value("n_used", std::size_t{0});
  fit.n_excluded = j.value("n_excluded", std::size_t{0});
  return fit;
}

}  // namespace stacc
