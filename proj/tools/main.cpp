#include "supwatt/cli.hpp"

int main(int argc, char** argv) { return supwatt::cli::run(argc, argv); }
