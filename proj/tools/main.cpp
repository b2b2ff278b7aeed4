#include "chanfront/cli.hpp"

int main(int argc, char** argv) { return chanfront::cli_main(argc, argv); }
