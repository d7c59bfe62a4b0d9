#include <cstdio>

int main() {
  std::puts("tpbc: subcommands not wired up yet");
  return 0;
}
