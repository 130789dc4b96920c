#include "cli.hpp"

int main(int argc, char** argv) { return perfwatt::cli::run(argc, argv); }
