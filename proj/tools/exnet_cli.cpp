#include "exnet/cli.hpp"

int main(int argc, char** argv) { return exnet::cli::main(argc, argv); }
