#include "stabexp/cli.hpp"

int main(int argc, char** argv) { return stabexp::cli::main(argc, argv); }
