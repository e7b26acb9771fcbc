#include "pixelarena/cli.hpp"

int main(int argc, char** argv) { return pixelarena::cli::main(argc, argv); }
