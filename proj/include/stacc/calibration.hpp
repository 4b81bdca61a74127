// Distance-decay functions and friction-coefficient estimation from flows.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace stacc {

enum class DecayFamily { power, exponential, gaussian };

const char* to_string(DecayFamily f);
DecayFamily parse_decay_family(const std::string& text);

/// beta is stored positive and applied as a decay (power: d^-beta).
/// Distances below `floor` are raised to it before evaluation.
struct DecaySpec {
  DecayFamily family = DecayFamily::power;
  double beta = 1.0;
  double floor = 0.0;
};

/// power: d^-beta; exponential: exp(-beta d); gaussian: exp(-d^2 / beta).
/// Unreachable impedances weigh 0. Throws for beta <= 0.
double decay(const DecaySpec& spec, double impedance);

struct FlowRecord {
  std::string origin;
  std::string destination;
  double commuters = 0.0;
};

/// One observation for the log-linear fit: flow, origin workers,
/// destination jobs and separation.
struct FlowObservation {
  double commuters = 0.0;
  double workers = 0.0;
  double jobs = 0.0;
  double distance = 0.0;
};

struct FrictionFit {
  double beta = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;
};

/// OLS of ln(C / (D S)) on ln(d): ln(C/(D S)) = intercept - beta ln d.
/// Records with non-positive flow, workers, jobs or with distance at or
/// below `distance_floor` (or unreachable) are excluded and counted.
/// Throws with fewer than 3 usable records or zero variance in ln d.
FrictionFit fit_friction(const std::vector<FlowObservation>& flows, double distance_floor = 0.0);

std::vector<FlowRecord> read_flows(const std::filesystem::path& path);
std::string to_json(const FrictionFit& fit);
FrictionFit friction_fit_from_json(const std::string& text);

}  // namespace stacc
