// config.hpp — JSON parameter ingestion and deterministic CSV/JSON emission.
// Every output file starts with comment lines embedding the resolved
// configuration; no timestamps, so identical configs give identical bytes.

#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "duffloq/params.hpp"

namespace duffloq::config {

using Json = nlohmann::json;

Json load_json_file(const std::string& path);

// Keys {"m","omega0","alpha","F","omega","gamma","hbar"}; absent keys keep
// the defaults of SystemParams. Unknown keys are rejected.
SystemParams system_params_from_json(const Json& j);
Json to_json(const SystemParams& p);

// Round-trip decimal formatting (17 significant digits).
std::string format_double(double value);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void comment(const std::string& line);
    void embed_config(const Json& j);  // single '# config: {...}' line
    void columns(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);

private:
    std::ostream& os_;
};

}  // namespace duffloq::config
