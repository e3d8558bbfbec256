#pragma once

namespace pcl {

// Every parallel kernel keeps a serial twin; tests compare the two.
enum class Exec { Serial, Parallel };

void set_threads(int n);
int max_threads();

}  // namespace pcl
