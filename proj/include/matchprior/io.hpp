#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "matchprior/model.hpp"
#include "matchprior/montecarlo.hpp"

namespace matchprior {

// Read a two-column CSV with header "x,y" and validate it against the
// model's schema: exp-ratio needs positive finite pairs, logistic a
// finite covariate and a 0/1 response, and at least two rows either way.
// Throws InputError naming the offending row and column.
Dataset read_dataset_csv(const std::string& path, const std::string& model_id);

// FNV-1a 64-bit digest of a file's raw bytes, as fixed-width hex.
std::string file_digest_hex(const std::string& path);

// Everything needed to replay a run bit-for-bit. No clocks, no
// environment: two runs with the same manifest produce identical bytes.
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> config;  // resolved flag values
    std::uint64_t seed = 0;
    std::string version;
    std::string input_digest;  // empty when no input file is involved

    std::string to_json() const;
};

// Simulation tables. The CSV carries full double precision; the text
// table mirrors the rows-by-methods, columns-by-format-and-sidedness
// layout. Wall time never appears in either.
std::string report_csv(const SimReport& report);
std::string report_table(const SimReport& report);
std::string coverage_csv(const CoverageReport& report);
std::string coverage_table(const CoverageReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace matchprior
