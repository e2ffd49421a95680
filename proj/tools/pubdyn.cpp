#include "pubdyn/cli.hpp"

int main(int argc, char** argv) { return pubdyn::cli::main(argc, argv); }
