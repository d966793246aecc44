#include <cstdio>

int main() {
  std::puts("treecode CLI placeholder");
  return 0;
}
