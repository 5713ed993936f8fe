// placeholder; filled in after unit suite is green
#include <cstdio>
int main() { std::puts("acceptance: not yet implemented"); return 1; }
