#include <string>
#include <vector>

#include "wqed/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wqed::cli_run(args);
}
