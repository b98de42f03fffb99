#include "geosubdiv/cli.hpp"

int main(int argc, char** argv) { return geosubdiv::cli::run(argc, argv); }
