#include "nlrl/cli.hpp"

int main(int argc, char** argv) { return nlrl::cli::main(argc, argv); }
