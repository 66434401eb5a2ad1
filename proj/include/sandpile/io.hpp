#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sandpile/montecarlo.hpp"
#include "sandpile/oracle.hpp"
#include "sandpile/stats.hpp"

namespace sandpile {

using json = nlohmann::ordered_json;

// Serialization for the command-line surfaces. All emitted files are
// deterministic functions of the run parameters: volatile fields such as
// wall time stay out of the files on purpose.

std::string format_double(double v);  // shortest round-trip decimal
std::string csv_quote(const std::string& field);

json batch_config_json(const BatchParams& params);
json batch_summary_json(const BatchSummary& summary);

// Per-trial CSV: trial_index,seed,L,R,hole,K,M,S,right_fluct,left_fluct
// with an empty hole field when no vacancy exists.
std::string trials_csv(const BatchSummary& summary);

json rational_json(const Rational& r);
json exact_distribution_json(const ExactDistribution& dist, const ExactMarginals& marg);

json report_json(const TestReport& report);
json report_bundle_json(const std::vector<TestReport>& reports);

// Plot-ready density table: bin_center,empirical_density,theoretical_density
// where the empirical bars integrate to 1 over the in-range bins and the
// theoretical curve is the N(0,(1-p)/12) density.
std::string plotdata_csv(const Histogram& hist, double p);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace sandpile
