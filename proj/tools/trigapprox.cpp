#include "trigapprox/cli.hpp"

int main(int argc, char** argv) { return trigapprox::cli::main(argc, argv); }
