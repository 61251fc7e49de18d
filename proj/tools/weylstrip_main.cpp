#include "weylstrip/experiment.hpp"

int main(int argc, char** argv) { return weylstrip::run_cli(argc, argv); }
