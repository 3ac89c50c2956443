#include <dagpath/cli.hpp>

int main(int argc, char** argv) {
  return dagpath::cli::run(argc, argv);
}
