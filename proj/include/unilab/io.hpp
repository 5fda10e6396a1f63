#pragma once

// Wire formats: JSON codecs for every domain type, a float-exact JSON
// dumper (17 significant digits, so doubles round-trip losslessly), and
// the CSV writer used by sweep exports.

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

#include "unilab/bayes.hpp"
#include "unilab/bell.hpp"
#include "unilab/causality.hpp"
#include "unilab/dynamics.hpp"
#include "unilab/matrix.hpp"
#include "unilab/quantum.hpp"

namespace unilab {

using nlohmann::json;

// Parses with errors wrapped as unilab::parse_error.
json parse_json_string(const std::string& text);
json parse_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// %.17g: the shortest fixed policy that makes doubles round-trip exactly.
std::string format17(double value);

// Deterministic dump: keys in nlohmann's sorted object order, floats at 17
// significant digits, two-space indent.
std::string dump_json17(const json& j);

// Complex matrices: {"rows": n, "cols": m, "entries": [[re, im], ...]},
// row-major. Real square matrices and vectors: {"dim": n, "entries": [...]}.
json complex_matrix_to_json(const CMatrix& m);
CMatrix complex_matrix_from_json(const json& j);
json real_square_to_json(const RMatrix& m);
RMatrix real_square_from_json(const json& j);
json real_vector_to_json(const RVector& v);
RVector real_vector_from_json(const json& j);

json probability_vector_to_json(const ProbabilityVector& p);
ProbabilityVector probability_vector_from_json(const json& j, double tolerance = tol::prob);
json stochastic_to_json(const StochasticMatrix& m);
StochasticMatrix stochastic_from_json(const json& j, double tolerance = tol::prob);

// {"dim": n, "segments": [{"duration": d, "h": <complex matrix>}, ...]}
json schedule_to_json(const HamiltonianSchedule& schedule);
HamiltonianSchedule schedule_from_json(const json& j);

json transition_report_to_json(const TransitionReport& report);
json scan_to_json(const std::vector<ScanPoint>& scan);

json composite_to_json(const CompositeSystem& cs);
CompositeSystem composite_from_json(const json& j);
json causal_report_to_json(const CausalReport& report);
json factorization_to_json(const FactorizationResult& result);

json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);
json state_to_json(const StateVector& psi);
StateVector state_from_json(const json& j);
json observable_to_json(const Observable& obs); // adds a "kind" tag
Observable observable_from_json(const json& j);

json scenario_to_json(const BellScenario& scenario);
// angles_in_degrees converts the setting lists (and nothing else) on load.
BellScenario scenario_from_json(const json& j, bool angles_in_degrees = false);

json correlator_to_json(const Correlator& c);
json bell1964_to_json(const Bell1964Result& r);
json epr_report_to_json(const EprReport& r);

using LhvModel = std::variant<LocalCausalModel, DeterministicLhv>;
// Dispatches on "type": "table" or "sign_model".
LhvModel lhv_model_from_json(const json& j, bool angles_in_degrees = false);

json joint_to_json(const JointDistribution& joint);
JointDistribution joint_from_json(const json& j, double tolerance = tol::prob);
json conditional_table_to_json(const ConditionalTable& table);

// A Bayesian network as a list of variables plus one conditional table
// per child; tables with no parents are priors.
struct BayesNetwork {
    std::vector<Variable> variables;
    std::vector<ConditionalTable> tables;
};
BayesNetwork network_from_json(const json& j);

// Joint distribution defined by the network as the product of its tables.
// Requires every variable to be the child of exactly one table and the
// parent structure to be acyclic.
JointDistribution network_joint(const BayesNetwork& network);

// CSV with a mandatory header row, ',' separators, '.' decimal point,
// floats at 17 significant digits.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<std::string>& fields);
    static std::string field(double value) { return format17(value); }
    static std::string field(bool value) { return value ? "true" : "false"; }
    static std::string field(const std::string& value) { return value; }

    const std::string& str() const { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

} // namespace unilab
