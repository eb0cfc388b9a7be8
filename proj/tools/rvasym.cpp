#include "rvasym/cli/commands.hpp"

int main(int argc, char** argv) { return rvasym::cli::run_cli(argc, argv); }
