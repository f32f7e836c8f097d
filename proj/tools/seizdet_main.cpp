#include "seizdet/cli.hpp"

int main(int argc, char** argv) { return seizdet::cli::run(argc, argv); }
