#include <iostream>
#include <string>
#include <vector>

#include "engel/cli.hpp"

int main(int argc, char** argv) {
    return engel::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
