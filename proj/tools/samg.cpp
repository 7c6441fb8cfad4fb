#include "samg/cli.hpp"

int main(int argc, char** argv) { return samg::cli::run(argc, argv); }
