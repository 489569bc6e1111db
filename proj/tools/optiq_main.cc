#include <iostream>

#include "optiq/cli.h"

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return optiq::cli::run(args, std::cout, std::cerr);
}
