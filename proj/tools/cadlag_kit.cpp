#include "kit/run.hpp"

int main(int argc, char** argv) { return kit::run_cli(argc, argv); }
