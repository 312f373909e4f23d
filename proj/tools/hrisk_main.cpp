#include "hrisk/cli.hpp"

int main(int argc, char** argv) { return hrisk::cli::run(argc, argv); }
