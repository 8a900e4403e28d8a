#include <vector>

#include "pgarch/cli.hpp"

int main(int argc, char** argv) {
    return pgarch::cli::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
