#include "sdwnlab/cli/commands.hpp"

int main(int argc, char** argv) { return sdwnlab::cli::run_cli(argc, argv); }
