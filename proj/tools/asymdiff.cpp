#include "asymdiff/experiments.hpp"

int main(int argc, char** argv) { return asymdiff::run_cli(argc, argv); }
