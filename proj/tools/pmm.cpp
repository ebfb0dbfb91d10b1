#include "pmm/harness.hpp"

int main(int argc, char** argv) { return pmm::harness::run_cli(argc, argv); }
