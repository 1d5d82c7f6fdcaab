#include "regenlab/cli.hpp"

int main(int argc, char** argv) { return regenlab::cli::cli_main(argc, argv); }
