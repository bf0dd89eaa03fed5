#include "motilab/commands.hpp"

int main(int argc, char** argv) { return motilab::run_cli(argc, argv); }
