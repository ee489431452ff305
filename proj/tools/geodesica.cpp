#include "geodesica/cli.hpp"

int main(int argc, char** argv) { return geodesica::cli::run(argc, argv); }
