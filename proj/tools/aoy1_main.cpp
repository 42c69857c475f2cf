#include <string>
#include <vector>

#include "ao/cli.hpp"

int main(int argc, char** argv) {
    return ao::run(std::vector<std::string>(argv + 1, argv + argc));
}
