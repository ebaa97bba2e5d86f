#include "opgrowth/cli.hpp"

int main(int argc, char** argv) { return opgrowth::cli::run(argc, argv); }
