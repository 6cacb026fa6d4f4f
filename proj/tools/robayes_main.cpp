#include "robayes/harness/cli.hpp"

int main(int argc, char** argv) {
  return robayes::harness::cli_main(argc, argv);
}
