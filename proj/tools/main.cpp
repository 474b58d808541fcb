#include <string>
#include <vector>

#include "cpb/cli.hpp"

int main(int argc, char** argv) {
    return cpb::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
