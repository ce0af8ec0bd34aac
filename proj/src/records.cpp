#include "rclab/records.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rclab {

RecordReadError::RecordReadError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

using nlohmann::json;

json number(double x) {
    if (std::isnan(x)) return "NaN";
    if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
    return x;
}

double to_double(const json& j) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "NaN") return std::nan("");
        if (s == "Infinity") return INFINITY;
        if (s == "-Infinity") return -INFINITY;
        throw std::invalid_argument("not a number: " + s);
    }
    return j.get<double>();
}

void dump_to(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_to(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_to(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                dump_to(number(x), out);
                break;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out += buf;
            // keep the float type on re-read
            if (std::strpbrk(buf, ".eEn") == nullptr) out += ".0";
            break;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json(const json& j) {
    std::string out;
    dump_to(j, out);
    return out;
}

json to_json(const MeasurementRecord& r) {
    const EstimateRecord& e = r.estimate;
    json ctx = {{"q", number(e.context.q)},   {"p", number(e.context.p)},     {"n", e.context.n},
                {"n1", e.context.n1},         {"n2", e.context.n2},           {"bc", e.context.bc},
                {"seed", e.context.seed},     {"algorithm", e.context.algorithm}};
    json extra = json::object();
    for (const auto& [k, v] : e.extra) extra[k] = number(v);
    json j = {{"name", e.name},
              {"value", number(e.value)},
              {"stderr", number(e.std_error)},
              {"n_samples", e.n_samples},
              {"n_effective", number(e.n_effective)},
              {"context", ctx},
              {"extra", extra},
              {"config", r.config},
              {"config_hash", r.config_hash},
              {"tool_version", r.tool_version},
              {"wall_clock_seconds", number(r.wall_clock_seconds)}};
    j["error"] = e.error ? json(*e.error) : json(nullptr);
    return j;
}

MeasurementRecord record_from_json(const json& j) {
    MeasurementRecord r;
    EstimateRecord& e = r.estimate;
    e.name = j.at("name").get<std::string>();
    e.value = to_double(j.at("value"));
    e.std_error = to_double(j.at("stderr"));
    e.n_samples = j.at("n_samples").get<std::size_t>();
    e.n_effective = to_double(j.at("n_effective"));
    const json& c = j.at("context");
    e.context.q = to_double(c.at("q"));
    e.context.p = to_double(c.at("p"));
    e.context.n = c.at("n").get<int>();
    e.context.n1 = c.at("n1").get<int>();
    e.context.n2 = c.at("n2").get<int>();
    e.context.bc = c.at("bc").get<std::string>();
    e.context.seed = c.at("seed").get<std::uint64_t>();
    e.context.algorithm = c.at("algorithm").get<std::string>();
    for (auto it = j.at("extra").begin(); it != j.at("extra").end(); ++it) e.extra[it.key()] = to_double(it.value());
    if (!j.at("error").is_null()) e.error = j.at("error").get<std::string>();
    r.config = j.at("config");
    r.config_hash = j.at("config_hash").get<std::string>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.wall_clock_seconds = to_double(j.at("wall_clock_seconds"));
    return r;
}

std::string serialize_record(const MeasurementRecord& r) { return dump_json(to_json(r)) + "\n"; }

void write_records(const std::vector<MeasurementRecord>& records, const std::string& path) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
    for (const auto& r : records) {
        const std::string line = serialize_record(r);
        const ssize_t n = ::write(fd, line.data(), line.size());
        if (n != static_cast<ssize_t>(line.size())) {
            ::close(fd);
            throw std::runtime_error("short write to " + path);
        }
    }
    ::close(fd);
}

std::vector<MeasurementRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<MeasurementRecord> out;
    std::string line;
    std::size_t number_ = 0;
    while (std::getline(in, line)) {
        ++number_;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const std::exception& ex) {
            throw RecordReadError(path, number_, ex.what());
        }
    }
    return out;
}

void write_csv(const std::vector<MeasurementRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "name,value,stderr,n_samples,n_effective,q,p,n,n1,n2,bc,seed,algorithm,error\n";
    auto num = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    for (const auto& r : records) {
        const auto& e = r.estimate;
        std::string err = e.error.value_or("");
        for (char& ch : err) {
            if (ch == ',' || ch == '"') ch = ';';
        }
        out << e.name << ',' << num(e.value) << ',' << num(e.std_error) << ',' << e.n_samples << ','
            << num(e.n_effective) << ',' << num(e.context.q) << ',' << num(e.context.p) << ',' << e.context.n << ','
            << e.context.n1 << ',' << e.context.n2 << ',' << e.context.bc << ',' << e.context.seed << ','
            << e.context.algorithm << ',' << err << '\n';
    }
}

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump_json(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace rclab
