#include "randfeat/cli.hpp"

int main(int argc, char** argv) { return randfeat::cli::run(argc, argv); }
