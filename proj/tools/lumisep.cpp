#include "lumisep/cli.hpp"

int main(int argc, char** argv) { return lumisep::cli_main(argc, argv); }
