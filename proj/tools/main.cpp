#include "qcool/cli.hpp"

int main(int argc, char** argv) {
    return qcool::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
