#pragma once
// Command dispatch behind the `qform` executable; kept in a library so tests can drive it in-process.

#include "qform/io.hpp"

#include <string>
#include <vector>

namespace qform::cli {

enum Exit : int { Computed = 0, Negative = 1, Undecided = 2, Invalid = 3 };

struct Options {
    Budget budget;
    std::size_t stab_cap = 3;
    std::size_t order_cap = 10000;
};

struct Outcome {
    io::json out;
    int exit = Computed;
};

const std::vector<std::string>& commands();

// Never throws: invalid input becomes {"error", "path"} with exit 3.
Outcome run(const std::string& command, const io::json& doc, const Options& opt = {});
Outcome run_text(const std::string& command, const std::string& text, const Options& opt = {});

// Canonical rendering: sorted keys, two-space indent, trailing newline.
std::string render(const io::json& j);

}  // namespace qform::cli
