#pragma once

#include <string>
#include <vector>

#include "artic/eval.hpp"
#include "artic/search.hpp"

namespace artic {

// External candidate schema: angles in degrees, lengths in normalized model
// units, floats printed with 17 significant digits so reload is bit-exact.
struct CandidatesFile {
  std::string shape_id;
  std::string config_hash;
  std::vector<CandidateArticulation> parts;
};

std::string candidates_to_json(const std::string& shape_id, const std::string& config_hash,
                               std::span<const CandidateArticulation> parts);

CandidatesFile parse_candidates_json(const std::string& text, const std::string& origin);

// predictions.json: a flat per-part list {part, m_rev, m_pri, axis?, pivot?}.
std::vector<PredictionRecord> parse_predictions_json(const std::string& text,
                                                     const std::string& origin);

}  // namespace artic
