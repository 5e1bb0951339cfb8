#include "shiftinv/cli.hpp"

int main(int argc, char** argv) { return shiftinv::cli::run(argc, argv); }
