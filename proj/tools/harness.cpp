#include "harness.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace critperc::cli {
namespace {

using nlohmann::json;

std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string toDecimal(uint128_t v) {
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return out;
}

uint128_t fromDecimal(const std::string& s) {
    uint128_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw std::runtime_error("bad checkpoint number: " + s);
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    return v;
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CLI::Option* findOption(CLI::App& app, std::string key) {
    for (auto& c : key)
        if (c == '_') c = '-';
    return app.get_option_no_throw("--" + key);
}

}  // namespace

CsvRow estimateRow(const std::string& experiment, std::int64_t n, double p, const std::string& variant,
                   const Estimate& e) {
    return {experiment, n, p, variant, e.samples, e.mean(), e.standardError(), e.seed.seed, e.seed.stream};
}

std::string csvHeader() { return "experiment,n,p,variant,samples,mean,stderr,seed,stream\n"; }

std::string formatCsv(const CsvRow& r) {
    std::ostringstream os;
    os << r.experiment << ',' << r.n << ',' << number(r.p) << ',' << r.variant << ',' << r.samples << ','
       << number(r.mean) << ',' << number(r.stderr_) << ',' << r.seed << ',' << r.stream << '\n';
    return os.str();
}

void applyConfigFile(CLI::App& app, const std::string& path) {
    const std::string text = readFile(path);
    std::vector<std::pair<std::string, std::vector<std::string>>> items;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json manifest;
        try {
            manifest = json::parse(text);
        } catch (const json::exception& e) {
            throw ConfigError(path + ": " + e.what());
        }
        if (manifest.value("experiment", "") != app.get_name())
            throw ConfigError(path + " is a manifest for '" + manifest.value("experiment", "") + "', not '" +
                              app.get_name() + "'");
        for (const auto& [key, value] : manifest.at("config").items()) {
            if (value.get<std::string>().empty()) continue;
            items.push_back({key, {value.get<std::string>()}});
        }
    } else {
        std::istringstream in(text);
        CLI::ConfigINI ini;
        for (const auto& item : ini.from_config(in)) {
            if (!item.parents.empty()) throw ConfigError(path + ": sections are not supported ('" + item.fullname() + "')");
            items.push_back({item.name, item.inputs});
        }
    }
    for (const auto& [key, inputs] : items) {
        CLI::Option* opt = findOption(app, key);
        if (opt == nullptr || key == "config") throw ConfigError(path + ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;  // the command line wins
        for (const auto& v : inputs) opt->add_result(v);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError(path + ": " + key + ": " + e.what());
        }
    }
}

std::map<std::string, std::string> resolvedConfig(const CLI::App& app, const std::vector<std::string>& skip) {
    std::map<std::string, std::string> out;
    for (const CLI::Option* opt : app.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
            if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
            if (value.empty() && opt->get_expected_min() == 0) value = "false";
        }
        out[name] = value;
    }
    return out;
}

std::string configHash(const std::string& experiment, const std::map<std::string, std::string>& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
        h = (h ^ 0xff) * 0x100000001b3ULL;
    };
    feed(experiment);
    for (const auto& [k, v] : config) {
        feed(k);
        feed(v);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string utcNow() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void writeManifest(const std::string& path, const Manifest& m) {
    json j;
    j["experiment"] = m.experiment;
    j["config"] = m.config;
    j["config_hash"] = m.configHash;
    j["seed"] = m.seed;
    j["version"] = CRITPERC_VERSION;
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["rows_written"] = m.rowsWritten;
    writeFileAtomically(path, j.dump(2) + "\n");
}

FileCheckpoint::FileCheckpoint(std::string path, std::string configHash)
    : path_(std::move(path)), hash_(std::move(configHash)) {
    if (!std::filesystem::exists(path_)) return;
    json j;
    try {
        j = json::parse(readFile(path_));
    } catch (const json::exception& e) {
        throw ConfigError("checkpoint " + path_ + ": " + e.what());
    }
    if (j.value("config_hash", "") != hash_)
        throw ConfigError("checkpoint " + path_ + " belongs to a different configuration");
    for (const auto& [key, v] : j.at("entries").items()) {
        Estimate e;
        e.samples = v.at("samples").get<std::uint64_t>();
        e.sum = v.at("sum").get<std::uint64_t>();
        e.sumSquares = fromDecimal(v.at("sum_squares").get<std::string>());
        e.indicator = v.at("indicator").get<bool>();
        e.seed = {v.at("seed").get<std::uint64_t>(), v.at("stream").get<std::uint64_t>()};
        entries_[key] = e;
    }
}

bool FileCheckpoint::load(const std::string& key, Estimate& partial) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return false;
    partial = it->second;
    return true;
}

void FileCheckpoint::store(const std::string& key, const Estimate& partial) {
    entries_[key] = partial;
    flush();
}

void FileCheckpoint::flush() const {
    json j;
    j["config_hash"] = hash_;
    j["entries"] = json::object();
    for (const auto& [key, e] : entries_) {
        j["entries"][key] = {{"samples", e.samples},   {"sum", e.sum},
                             {"sum_squares", toDecimal(e.sumSquares)},
                             {"indicator", e.indicator}, {"seed", e.seed.seed},
                             {"stream", e.seed.stream}};
    }
    writeFileAtomically(path_, j.dump(1) + "\n");
}

void writeFileAtomically(const std::string& path, const std::string& text) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << text;
        if (!out.flush()) throw std::runtime_error("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, target);
}

std::string dyadicFraction(double value) {
    if (!std::isfinite(value)) return number(value);
    for (int k = 0; k <= 20; ++k) {
        const double scaled = std::ldexp(value, k);
        if (scaled == std::floor(scaled) && std::fabs(scaled) < 9e15) {
            long long num = static_cast<long long>(scaled);
            long long den = 1LL << k;
            if (den == 1) return std::to_string(num);
            return std::to_string(num) + "/" + std::to_string(den);
        }
    }
    return number(value);
}

}  // namespace critperc::cli
