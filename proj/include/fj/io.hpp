#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fj/comparison.hpp"
#include "fj/integrator.hpp"
#include "fj/scan.hpp"
#include "fj/stability.hpp"

namespace fj::io {

using Json = nlohmann::ordered_json;

// 12 significant digits, locale-independent ("%.12g" in the C locale).
std::string format_number(double x);

// x rounded to 12 significant digits, so JSON output has the same precision
// as the CSV files.
double round12(double x);

inline constexpr const char* kTrajectoryHeader =
    "t,P1,P2,P3,P4,Ptot,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,re_a4,im_a4";

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

// Parses the CSV written by write_trajectory_csv. Throws ConfigError naming
// the offending line or column on schema mismatch.
Trajectory read_trajectory_csv(std::istream& in);

Json to_json(const SystemParams& p);
SystemParams params_from_json(const Json& j);

Json to_json(const IntegrationConfig& cfg);
IntegrationConfig integration_from_json(const Json& j);

Json to_json(Complex z);  // {"re": .., "im": ..}
Json to_json(const EffectiveCouplings& c);
Json to_json(const StabilityVerdict& v);
Json to_json(const ModeSet& modes);
Json to_json(const EquilibriumReport& r);
Json to_json(const DeviationReport& r);
Json to_json(const AsymptoticEstimate& e);
Json to_json(const Axis& a);
Json to_json(const ScanGrid& g);
Json to_json(const DynamicsCheck& d);

// Writes `text` to `path`, throwing ConfigError if the file cannot be opened.
void write_file(const std::string& path, const std::string& text);

}  // namespace fj::io
