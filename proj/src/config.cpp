#include "duffloq/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace duffloq::config {

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    Json j;
    in >> j;
    return j;
}

SystemParams system_params_from_json(const Json& j) {
    static const char* keys[] = {"m", "omega0", "alpha", "F", "omega", "gamma", "hbar"};
    SystemParams p;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known)
            throw std::invalid_argument("config: unknown parameter key '" + it.key() + "'");
        if (!it.value().is_number())
            throw std::invalid_argument("config: parameter '" + it.key() + "' must be a number");
    }
    p.m = j.value("m", p.m);
    p.omega0 = j.value("omega0", p.omega0);
    p.alpha = j.value("alpha", p.alpha);
    p.F = j.value("F", p.F);
    p.omega = j.value("omega", p.omega);
    p.gamma = j.value("gamma", p.gamma);
    p.hbar = j.value("hbar", p.hbar);
    p.validate();
    return p;
}

Json to_json(const SystemParams& p) {
    return Json{{"m", p.m},         {"omega0", p.omega0}, {"alpha", p.alpha}, {"F", p.F},
                {"omega", p.omega}, {"gamma", p.gamma},   {"hbar", p.hbar}};
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void CsvWriter::comment(const std::string& line) { os_ << "# " << line << "\n"; }

void CsvWriter::embed_config(const Json& j) { os_ << "# config: " << j.dump() << "\n"; }

void CsvWriter::columns(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i)
        os_ << names[i] << (i + 1 < names.size() ? "," : "");
    os_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        os_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "");
    os_ << "\n";
}

}  // namespace duffloq::config
