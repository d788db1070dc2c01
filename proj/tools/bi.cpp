// placeholder during bring-up; replaced by the real CLI
int main() { return 0; }
