#include <cstdio>

int main() {
  std::fprintf(stderr, "ordalia: no subcommands wired yet\n");
  return 2;
}
