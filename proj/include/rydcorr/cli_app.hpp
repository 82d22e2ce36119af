#pragma once

#include <string>
#include <vector>

namespace rydcorr {

// Full command-line entry point (verbs: run, validate, presets). Takes the
// arguments without the program name; returns the process exit code.
int cli_main(std::vector<std::string> args);

}  // namespace rydcorr
