#include "qhm/cli/commands.hpp"

int main(int argc, char** argv) { return qhm::cli::run(argc, argv); }
