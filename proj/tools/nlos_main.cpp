#include <iostream>

#include "nlos/cli.hpp"

int main(int argc, char** argv) {
    return nlos::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
