#include <string>
#include <vector>

#include "slowfast/cli.hpp"

int main(int argc, char** argv) {
    return slowfast::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
