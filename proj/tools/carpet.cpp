#include "usc/cli.hpp"

int main(int argc, char** argv) { return usc::run_command(argc, argv); }
