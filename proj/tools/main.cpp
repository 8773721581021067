#include "talbot/cli_io.hpp"

int main(int argc, char** argv) { return talbot::run_cli(argc, argv); }
