#include "chradial/cli.hpp"

int main(int argc, char** argv) { return chradial::cli::main(argc, argv); }
