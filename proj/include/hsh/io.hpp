#ifndef HSH_IO_HPP
#define HSH_IO_HPP

#include <string>

#include <json.hpp>

#include "hsh/angular.hpp"
#include "hsh/exponents.hpp"
#include "hsh/nonlinear.hpp"
#include "hsh/spectra.hpp"
#include "hsh/verify.hpp"

namespace hsh::io {

using json = nlohmann::ordered_json;

// shortest round-trip decimal form (std::to_chars)
std::string format_double(double v);

json to_json(const frobenius::Expansion& e);
frobenius::Expansion expansion_from_json(const json& j);

json to_json(const PowerModel& m);
PowerModel power_model_from_json(const json& j);

json to_json(const AngularProfile& p);
AngularProfile profile_from_json(const json& j);

json to_json(const nonlinear::Bracket& b);
nonlinear::Bracket bracket_from_json(const json& j);

json to_json(const nonlinear::NonlinearProfile& p);
nonlinear::NonlinearProfile nonlinear_profile_from_json(const json& j);

json to_json(const spectra::SeparableHarmonic& h);
spectra::SeparableHarmonic harmonic_from_json(const json& j);

json to_json(const spectra::EigenResult& e);
spectra::EigenResult eigen_result_from_json(const json& j);

json to_json(const ExponentTable& t);
json to_json(const RegimeClassification& rc);
json to_json(const spectra::GrowthBoundReport& r);
json to_json(const verify::BoundReport& r);
json to_json(const verify::PLVerdict& v);
json to_json(const nonlinear::UniquenessReport& r);

// wrapped {"artifact": kind, "version": 1, "data": ...} documents
void save_artifact(const std::string& path, const std::string& kind, const json& data);
json load_artifact(const std::string& path, std::string* kind_out = nullptr);

}  // namespace hsh::io

#endif
