#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmfloor/cone.hpp"
#include "mmfloor/prob.hpp"

namespace mmfloor {

// One self-contained analysis input: the space, the trading cone, the floor
// density f, and optionally a truncation spec plus witness elements used by
// the non-polyhedral truncation suprema.
struct Market {
  SpacePtr space;
  MarketCone cone;
  RandomVariable f;
  std::optional<TruncationSpec> truncation;
  std::vector<RandomVariable> witnesses;
};

// Raised for both malformed JSON (with position info) and schema violations
// (with the offending field path). Unknown fields are errors, not noise.
class MarketFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The file format is a single JSON object:
//
//   {
//     "atoms":      [{"label": "1", "prob": "1/4"}, ...],
//     "generators": [["1", "-1/2", "0"], ...],
//     "mode":       "cone" | "subspace" | "cone_minus_positives",
//     "f":          ["1", "0", "0"],
//     "truncation": {"kind": "unit_ball"}
//                 | {"kind": "eps_sequence", "eps": ["1/2", "1/4"]}
//                 | {"kind": "orlicz", "phi": {"knots": [["0","0"], ...],
//                    "tail_slope": "2", "tail_quad": "1"}},   (optional)
//     "witnesses":  [["3", "-1", "0"], ...]                   (optional)
//   }
//
// Every number is an exact "p/q" (or integer "p") string; floats are never
// read or written. All module invariants are re-validated on load.
Market parse_market(const std::string& text);
Market load_market(const std::string& path);

std::string serialize_market(const Market& market);
void save_market(const Market& market, const std::string& path);

}  // namespace mmfloor
