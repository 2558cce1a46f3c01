#include "podkit/cli.hpp"

int main(int argc, char** argv) { return podkit::cli::main(argc, argv); }
