#include <vector>

#include "attbound/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return attbound::cli_main(args);
}
