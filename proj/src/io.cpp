#include "matchprior/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "matchprior/version.hpp"

namespace matchprior {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_field(const std::string& field, std::size_t line_no, const char* column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        std::ostringstream msg;
        msg << "line " << line_no << ", column " << column
            << ": not a number: '" << field << "'";
        throw InputError(msg.str());
    }
}

std::string rate17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path, const std::string& model_id) {
    if (model_id != "exp-ratio" && model_id != "logistic") {
        throw InputError("unknown model: " + model_id);
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    if (trim(line) != "x,y") {
        throw InputError(path + ": line 1: expected header 'x,y', got '" + trim(line) +
                         "'");
    }

    Dataset data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos) {
            std::ostringstream msg;
            msg << path << ": line " << line_no << ": expected two comma-separated values";
            throw InputError(msg.str());
        }
        const double x = parse_field(trim(row.substr(0, comma)), line_no, "x");
        const double y = parse_field(trim(row.substr(comma + 1)), line_no, "y");

        std::ostringstream where;
        where << path << ": line " << line_no;
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw InputError(where.str() + ": values must be finite");
        }
        if (model_id == "exp-ratio") {
            if (!(x > 0.0)) throw InputError(where.str() + ": column x must be positive");
            if (!(y > 0.0)) throw InputError(where.str() + ": column y must be positive");
        } else {
            if (y != 0.0 && y != 1.0) {
                throw InputError(where.str() + ": column y must be 0 or 1");
            }
        }
        data.x.push_back(x);
        data.y.push_back(y);
    }
    if (data.size() < 2) {
        throw InputError(path + ": need at least two data rows");
    }
    return data;
}

std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file for digest: " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["seed"] = seed;
    j["version"] = version.empty() ? k_version : version;
    j["input_digest"] = input_digest;
    return j.dump(2) + "\n";
}

std::string report_csv(const SimReport& report) {
    std::ostringstream out;
    out << "method,valid,degenerate,rej_bn_one,rej_bn_two,rej_lr_one,rej_lr_two,"
           "rate_bn_one,rate_bn_two,rate_lr_one,rate_lr_two,near_singular,lr_clamped\n";
    for (const auto& m : report.methods) {
        out << m.id << ',' << m.valid << ',' << m.degenerate_count << ','
            << m.rej_bn_one << ',' << m.rej_bn_two << ',' << m.rej_lr_one << ','
            << m.rej_lr_two << ',' << rate17(m.rate_bn_one()) << ','
            << rate17(m.rate_bn_two()) << ',' << rate17(m.rate_lr_one()) << ','
            << rate17(m.rate_lr_two()) << ',' << m.near_singular_count << ','
            << m.lr_clamped_count << '\n';
    }
    return out.str();
}

std::string report_table(const SimReport& report) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s %9s %9s %9s %9s %9s %7s %8s %7s\n", "method",
                  "bn-1side", "bn-2side", "lr-1side", "lr-2side", "valid", "degen",
                  "nearsing", "clamped");
    out << buf;
    for (const auto& m : report.methods) {
        std::snprintf(buf, sizeof buf,
                      "%-24s %9.4f %9.4f %9.4f %9.4f %9llu %7llu %8llu %7llu\n",
                      m.id.c_str(), m.rate_bn_one(), m.rate_bn_two(), m.rate_lr_one(),
                      m.rate_lr_two(), static_cast<unsigned long long>(m.valid),
                      static_cast<unsigned long long>(m.degenerate_count),
                      static_cast<unsigned long long>(m.near_singular_count),
                      static_cast<unsigned long long>(m.lr_clamped_count));
        out << buf;
    }
    return out.str();
}

std::string coverage_csv(const CoverageReport& report) {
    std::ostringstream out;
    out << "method,covered,valid,degenerate,coverage_rate,level\n";
    for (const auto& m : report.methods) {
        const double rate = m.valid ? double(m.covered) / double(m.valid) : 0.0;
        out << m.id << ',' << m.covered << ',' << m.valid << ',' << m.degenerate_count
            << ',' << rate17(rate) << ',' << rate17(report.level) << '\n';
    }
    return out.str();
}

std::string coverage_table(const CoverageReport& report) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s %9s %9s %7s %10s\n", "method", "covered",
                  "valid", "degen", "coverage");
    out << buf;
    for (const auto& m : report.methods) {
        const double rate = m.valid ? double(m.covered) / double(m.valid) : 0.0;
        std::snprintf(buf, sizeof buf, "%-24s %9llu %9llu %7llu %10.4f\n", m.id.c_str(),
                      static_cast<unsigned long long>(m.covered),
                      static_cast<unsigned long long>(m.valid),
                      static_cast<unsigned long long>(m.degenerate_count), rate);
        out << buf;
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open output file: " + path);
    out << content;
    if (!out) throw InputError("failed writing output file: " + path);
}

}  // namespace matchprior
