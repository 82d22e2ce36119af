#include <vector>

#include "rydcorr/cli_app.hpp"

int main(int argc, char** argv) {
    return rydcorr::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
