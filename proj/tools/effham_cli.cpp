#include "effham/cli.hpp"

int main(int argc, char** argv) { return effham::run_command(argc, argv); }
