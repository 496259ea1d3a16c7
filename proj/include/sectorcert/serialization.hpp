#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "sectorcert/certify.hpp"
#include "sectorcert/lti.hpp"
#include "sectorcert/lure_sim.hpp"
#include "sectorcert/sector.hpp"
#include "sectorcert/signal.hpp"

namespace sectorcert {

using Json = nlohmann::ordered_json;

// --- signals ---------------------------------------------------------------

/// JSON arrays of arrays, time-major: [[x0...], [x1...], ...].
Json signal_to_json(const Signal& s);
Signal signal_from_json(const Json& j);

/// CSV: one row per time index.  An optional header `k,v0,...,v{m-1}` adds a
/// leading index column; both layouts are accepted on read.
void signal_to_csv(const Signal& s, std::ostream& out, bool header = true);
Signal signal_from_csv(std::istream& in);

// --- systems and sectors ---------------------------------------------------

Json statespace_to_json(const StateSpace& G);
/// {"A": [[...]], "B": [[...]], "C": [[...]], "D": [[...]]}; dimensions are
/// inferred and n = 0 is encoded as empty arrays for A, B, C.
StateSpace statespace_from_json(const Json& j);

Json quadspec_to_json(const QuadSpec& K);
QuadSpec quadspec_from_json(const Json& j, Side default_side);

/// Parsed sector input: always an M; N and validity present when the file
/// named a preset (or gave an explicit N).
struct SectorInput {
  QuadSpec M;
  std::optional<QuadSpec> N;
  std::optional<SectorPair> pair;
};

/// Accepts either {"preset": ..., "params": {...}, "feedback": ...} or the
/// explicit {"M": [[...]], "side": "phi", "feedback": "positive"} form (with
/// optional "N").
SectorInput sector_from_json(const Json& j);

Json nonlinearity_to_json(const Nonlinearity& phi);
Nonlinearity nonlinearity_from_json(const Json& j);

// --- results ---------------------------------------------------------------

Json certificate_to_json(const Certificate& cert);
Json witness_to_json(const ViolationWitness& w);

/// Loop trajectory as CSV with columns k, e1..., e2..., y1..., y2..., x...
void trajectory_to_csv(const LoopTrajectory& run, std::ostream& out);

// --- deterministic emission --------------------------------------------------

/// Serializes with fixed field order and every double printed with 17
/// significant digits, so identical inputs give byte-identical reports.
std::string dump_json(const Json& j, int indent = 2);

}  // namespace sectorcert
