#pragma once

// Command-line front end: configuration, subcommand dispatch, and record
// emission. Results go to standard output as one record per line of
// space-separated key=value pairs; every ball-valued field travels with an
// explicit radius so the error bar is part of the report. Output is
// deterministic: identical invocations are byte-identical, including under
// --jobs parallelism.

#include <string>
#include <vector>

#include "ao/polytext.hpp"
#include "ao/quad.hpp"

namespace ao {

// Desk-scale guards the front end enforces before dispatching.
struct SizeCaps {
    long phi_level = 20;     // largest modular-polynomial level
    long search = 2000000;   // largest enumeration a search may visit
};

// Runtime knobs shared by all subcommands. An optional JSON config file
// sets fields; command-line flags override the file; defaults are embedded.
struct Config {
    Prec default_prec = 128; // working precision in bits, >= 64
    SizeCaps size_caps;
    TatuzawaConfig tatuzawa;
    std::string cache_dir; // empty disables the on-disk polynomial caches
};

// Read a JSON config, e.g.
//   {"default_prec": 192, "size_caps": {"phi_level": 12, "search": 100000},
//    "tatuzawa": {"epsilon_star": "1/100", "exceptional_d": -5077},
//    "cache_dir": "/tmp/aoy1"}
// Missing fields keep their defaults. Throws ParseError on malformed JSON
// and OutOfDomain when a field violates its floor (prec >= 64, caps > 0).
Config load_config(const std::string& path);

// Entry point behind main(): argv without the program name. Dispatches the
// subcommands j, classnum, lambda, hcp, phi, dnd, search, certify-dominance,
// equidist, flow, scan-tatuzawa, count-points. Records go to standard
// output, diagnostics to standard error. Exit codes: 0 completed, 2
// completed with undecided cases reported, 1 runtime error, 64 usage error.
int run(const std::vector<std::string>& args);

} // namespace ao
