#include <iostream>

#include "qdtherm/cli/commands.hpp"

int main(int argc, char** argv) {
    return qdtherm::cli::run(argc, argv, std::cout, std::cerr);
}
