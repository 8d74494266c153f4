#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "lindyn/cosine.hpp"
#include "lindyn/holo.hpp"
#include "lindyn/luh.hpp"
#include "lindyn/maps.hpp"

namespace lindyn::io {

using json = nlohmann::json;

inline constexpr const char* kReportSchema = "lindyn.report/1";
inline constexpr const char* kConfigSchema = "lindyn.config/1";

// Invalid input; path is a JSON-pointer-like location such as "luh.compacts[1].radius".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& why)
        : std::runtime_error(path + ": " + why), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Typed field access with path-carrying errors.
const json& field(const json& obj, const std::string& key, const std::string& path);
bool has(const json& obj, const std::string& key);
double get_double(const json& obj, const std::string& key, const std::string& path);
double get_double(const json& obj, const std::string& key, const std::string& path, double fallback);
std::int64_t get_int(const json& obj, const std::string& key, const std::string& path);
std::int64_t get_int(const json& obj, const std::string& key, const std::string& path, std::int64_t fallback);
bool get_bool(const json& obj, const std::string& key, const std::string& path, bool fallback);
std::string get_string(const json& obj, const std::string& key, const std::string& path);
std::string get_string(const json& obj, const std::string& key, const std::string& path, const std::string& fallback);
std::string join(const std::string& path, const std::string& key);
std::string join(const std::string& path, std::size_t index);

// Doubles that may be infinite or NaN are written as strings ("inf", "-inf", "nan").
json real_to_json(double x);
double real_from_json(const json& j, const std::string& path);

json to_json(cplx z);
cplx complex_from_json(const json& j, const std::string& path);

json to_json(const holo::ComplexPoly& p);
holo::ComplexPoly poly_from_json(const json& j, const std::string& path);
json to_json(const holo::CompactSet& K);
holo::CompactSet compact_from_json(const json& j, const std::string& path);
json to_json(const holo::PlanarDomain& dom);
holo::PlanarDomain domain_from_json(const json& j, const std::string& path);

json to_json(const maps::SelfMap& phi);
maps::SelfMap map_from_json(const json& j, const std::string& path);
json to_json(const maps::RunawayCertificate& c);
maps::RunawayCertificate runaway_certificate_from_json(const json& j, const std::string& path);
json to_json(const maps::OrbitProbeResult& r);
maps::OrbitProbeResult orbit_probe_from_json(const json& j, const std::string& path);

json to_json(const luh::DiskChain& ch);
luh::DiskChain disk_chain_from_json(const json& j, const std::string& path);
json to_json(const luh::LuhParams& p);
luh::LuhParams luh_params_from_json(const json& j, const std::string& path);
json to_json(const luh::LuhTask& t);
luh::LuhTask luh_task_from_json(const json& j, const std::string& path);
json to_json(const luh::Requirement& r);
luh::Requirement requirement_from_json(const json& j, const std::string& path);
json to_json(const luh::LuhCertificate& c);
luh::LuhCertificate luh_certificate_from_json(const json& j, const std::string& path);
json to_json(const luh::StageRecord& r);
luh::StageRecord stage_record_from_json(const json& j, const std::string& path);
json to_json(const luh::DenseApprox& d);
luh::DenseApprox dense_approx_from_json(const json& j, const std::string& path);

json to_json(const cosine::GridFunction& f);
cosine::GridFunction grid_function_from_json(const json& j, const std::string& path, int cells_per_unit);
json to_json(const cosine::Weight& w);
cosine::Weight weight_from_json(const json& j, const std::string& path);
json to_json(const cosine::NormSpec& s);
cosine::NormSpec norm_spec_from_json(const json& j, const std::string& path);
json to_json(const cosine::PartitionScheme& s);
cosine::PartitionScheme partition_scheme_from_json(const json& j, const std::string& path);
json to_json(const cosine::ConditionReport& r);
cosine::ConditionReport condition_report_from_json(const json& j, const std::string& path);
json to_json(const cosine::DemoReport& r);
cosine::DemoReport demo_report_from_json(const json& j, const std::string& path);

// Stable text form: two-space indent, trailing newline.
std::string dump(const json& j);

}  // namespace lindyn::io
