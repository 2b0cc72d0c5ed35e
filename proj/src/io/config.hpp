#pragma once

#include <cstdint>
#include <string>

#include "core/params.hpp"

namespace vlaser {

// One axis of a two-parameter sweep: `count` uniformly spaced values of the
// named physical parameter from lo to hi inclusive.
struct AxisSpec {
  std::string param;
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

// Triangular drive ramp for the hysteresis scan: the named parameter rises
// from zero at `rate` until `time`, then falls back at the same rate.
struct RampSpec {
  std::string param = "omega_p";
  double rate = 0.0;
  double time = 0.0;
  int grid = 201;
  double window = 0.0;  // averaging window; 0 selects fifty detuning periods
  double seed_alpha = 1e-3;
};

// Bracket for the lasing-threshold bisection along one parameter axis.
struct ThresholdSpec {
  std::string axis = "n_atoms";
  double lo = 0.0;
  double hi = 0.0;
};

// Complete description of one program run.  Flat key = value text maps onto
// this struct one key per field; see the key table in config.cpp.
struct RunConfig {
  std::string mode = "steady";
  PhysicalParams params;

  std::string point_mode = "stability";  // what sweep2d computes per point
  AxisSpec axis1, axis2;
  ThresholdSpec threshold;
  RampSpec ramp;

  double trajectory_time = 100.0;  // integration horizon of trajectory mode
  double sample_stride = 0.5;      // sampling interval of trajectory mode
  bool trajectory_ramped = false;  // drive the ramp during the trajectory

  std::string out;  // output path; empty writes to standard output
  std::string format = "csv";
  std::uint64_t seed = 0;  // reserved; no current mode draws random numbers
  int workers = 1;

  // Cross-field rules for the selected mode (parameter validity, bracket
  // ordering, grid sizes).  Throws ValidationError.
  void validate() const;
};

// Parse flat `key = value` text ('#' starts a comment, blank lines ignored,
// duplicate keys rejected).  Throws ParseError on malformed input; the
// result is not validate()d so partial configs can still be amended.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Set / read back one field by key, applying the same value checks as the
// parser.  set_key throws ParseError; get_key returns the canonical text.
void set_key(RunConfig& c, const std::string& key, const std::string& value);
std::string get_key(const RunConfig& c, const std::string& key);

// Full canonical rendering; parse_config(canonical_config(c)) reproduces c
// exactly (doubles are emitted round-trip).
std::string canonical_config(const RunConfig& c);

}  // namespace vlaser
