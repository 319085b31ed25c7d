#include <cstdio>

int main() {
  std::puts("lpval: CLI not wired yet");
  return 0;
}
