#include "yardsale/cli.hpp"

int main(int argc, char** argv) { return yardsale::cli_main(argc, argv); }
