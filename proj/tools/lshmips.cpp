#include "lshmips/cli.hpp"

int main(int argc, char** argv) { return lshmips::cli::run_main(argc, argv); }
